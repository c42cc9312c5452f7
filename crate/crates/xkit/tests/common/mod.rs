//! Oracles shared by the integration suites.
//!
//! Everything here recomputes a quantity along a path that is independent
//! of the library's own algorithm for it — exhaustive enumeration instead
//! of the per-outcome greedy rule, grid scans instead of eigensolves and
//! linear programs — so agreement is evidence, not circularity.

#![allow(dead_code)] // each integration target uses its own subset

use num_complex::Complex64;
use xkit::linalg::{trace_product, HermitianOperator};
use xkit::objects::{Ensemble, Povm};

/// Minimal exclusion error by brute force: every one of the `k^o`
/// deterministic assignments is evaluated in full.
pub fn brute_force_quantum_error(e: &Ensemble, m: &Povm) -> f64 {
    let o = m.outcomes();
    let k = e.len();
    let mut weighted = vec![vec![0.0; k]; o];
    for (a, row) in weighted.iter_mut().enumerate() {
        for (x, cell) in row.iter_mut().enumerate() {
            *cell = e.prior(x) * trace_product(m.effect(a), e.state(x)).expect("valid inputs");
        }
    }
    let total = k.checked_pow(o as u32).expect("enumeration fits in usize");
    let mut best = f64::INFINITY;
    for code in 0..total {
        let mut err = 0.0;
        let mut digits = code;
        for row in weighted.iter() {
            err += row[digits % k];
            digits /= k;
        }
        best = best.min(err);
    }
    best
}

/// Smallest expectation `⟨ψ|A|ψ⟩` of a qubit operator over a Bloch-sphere
/// grid with `steps²` points. Approximates `λ_min` from above with an
/// `O(1/steps²)` bias — an eigensolver-free reference for d = 2.
pub fn bloch_grid_min_expectation(a: &HermitianOperator, steps: usize) -> f64 {
    assert_eq!(a.dim(), 2, "Bloch grid only covers qubits");
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let theta = std::f64::consts::PI * i as f64 / steps as f64;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        for j in 0..steps {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / steps as f64;
            let psi = [
                Complex64::new(c, 0.0),
                Complex64::from_polar(s, phi),
            ];
            let mut expectation = Complex64::new(0.0, 0.0);
            for r in 0..2 {
                for col in 0..2 {
                    expectation += psi[r].conj() * a.entry(r, col) * psi[col];
                }
            }
            best = best.min(expectation.re);
        }
    }
    best
}

/// Best max-norm reproduction residual over a grid of 2×2 stochastic maps
/// applied to the qubit Z measurement, targeting the X measurement. Any
/// mix of the diagonal Z effects stays diagonal, so the off-diagonal 1/2
/// of the X effects is unreachable; the scan should bottom out at 0.5.
pub fn zx_best_reproduction_residual(steps: usize) -> f64 {
    let z = Povm::qubit_z();
    let x = Povm::qubit_x();
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let p = i as f64 / steps as f64; // q(0|0)
        for j in 0..=steps {
            let r = j as f64 / steps as f64; // q(0|1)
            let weights = [[p, 1.0 - p], [r, 1.0 - r]];
            let mut worst = 0.0f64;
            for (xo, target) in x.effects().iter().enumerate() {
                let rebuilt = z
                    .effect(0)
                    .scale(weights[0][xo])
                    .add(&z.effect(1).scale(weights[1][xo]));
                worst = worst.max(rebuilt.sub(target).max_norm());
            }
            best = best.min(worst);
        }
    }
    best
}

/// All `(d, o, k)` shapes inside the supported desk-scale ranges whose
/// assignment space is small enough to enumerate exhaustively.
pub fn enumerable_shapes(limit: usize) -> Vec<(usize, usize, usize)> {
    let mut shapes = Vec::new();
    for d in 2usize..=4 {
        for o in 2usize..=6 {
            for k in 2usize..=6 {
                if k.checked_pow(o as u32).is_some_and(|n| n <= limit) {
                    shapes.push((d, o, k));
                }
            }
        }
    }
    shapes
}
