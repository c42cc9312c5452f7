//! Measurement simulability.
//!
//! `ℕ` is simulable by `𝕄` when some stochastic map `q` reproduces it:
//! `N_x = Σ_a q(x|a)·M_a`. Deciding this is a linear feasibility problem:
//! the operator equalities are expanded in a real Hermitian basis
//! (generalized Gell-Mann matrices plus the identity — `d²` real equations
//! per target effect), the table entries are the nonnegative unknowns, and
//! the per-input row sums are pinned to one. The bundled simplex answers
//! feasibility exactly at these tiny sizes, and a returned map is always
//! re-verified against the target independently of solver internals.
//!
//! Error probabilities of exclusion games form a complete set of monotones
//! for this preorder: simulability holds exactly when the simulating
//! measurement is never worse on any game. [`monotone_audit`] samples that
//! ordering, and [`find_violating_ensemble`] searches for an explicit game
//! separating a non-simulable pair. The search is heuristic by design —
//! the LP verdict is authoritative, the witness is explanatory evidence.

use rayon::prelude::*;

use crate::games::{optimal_exclusion_game, quantum_error};
use crate::information::derive_seed;
use crate::linalg::{self, ComplexMatrix, HermitianOperator};
use crate::objects::{random_ensemble, random_stochastic_map, Ensemble, Povm, StochasticMap};
use crate::simplex::{self, LinearProgram, LpOutcome};
use crate::{Error, Result};

/// Smallest error-probability gap accepted as a violation witness.
pub const VIOLATION_MIN: f64 = 1e-7;
/// Gap above which a sampled game counts as an ordering violation.
pub const AUDIT_TOL: f64 = 1e-9;
/// Point-mass prior assigned to the filler states of the constructed
/// witness ensembles (before renormalization).
const FILLER_PRIOR: f64 = 1e-3;

/// Verdict of [`check_simulable`].
#[derive(Debug, Clone)]
pub enum SimulabilityResult {
    /// A reproducing stochastic map was found and re-verified.
    Simulable(StochasticMap),
    /// The feasibility LP has no solution. The witness fields stay empty
    /// until [`find_violating_ensemble`] fills them.
    NotSimulable {
        witness: Option<Ensemble>,
        violation: Option<f64>,
    },
}

impl SimulabilityResult {
    pub fn is_simulable(&self) -> bool {
        matches!(self, SimulabilityResult::Simulable(_))
    }
}

/// The operators `Δ_x = Σ_a p(x|a)·M_a − N_x` for a candidate map `p`.
/// They sum to zero for any valid stochastic map between complete POVMs.
#[derive(Debug, Clone)]
pub struct DeltaOperators {
    deltas: Vec<HermitianOperator>,
}

impl DeltaOperators {
    pub fn deltas(&self) -> &[HermitianOperator] {
        &self.deltas
    }

    /// `‖Σ_x Δ_x‖_max`.
    pub fn sum_deviation(&self) -> f64 {
        let d = self.deltas[0].dim();
        let mut sum = ComplexMatrix::zero(d);
        for delta in &self.deltas {
            sum = sum.add(delta.matrix());
        }
        sum.max_norm()
    }
}

/// Orthogonal Hermitian basis of the d×d operators: the identity followed
/// by the generalized Gell-Mann matrices (symmetric, antisymmetric, and
/// diagonal families).
pub fn hermitian_basis(d: usize) -> Vec<HermitianOperator> {
    use num_complex::Complex64;
    let mut basis = vec![HermitianOperator::identity(d)];
    for i in 0..d {
        for j in (i + 1)..d {
            let mut sym = ComplexMatrix::zero(d);
            sym.set(i, j, Complex64::new(1.0, 0.0));
            sym.set(j, i, Complex64::new(1.0, 0.0));
            basis.push(HermitianOperator::new_unchecked(sym));

            let mut asym = ComplexMatrix::zero(d);
            asym.set(i, j, Complex64::new(0.0, -1.0));
            asym.set(j, i, Complex64::new(0.0, 1.0));
            basis.push(HermitianOperator::new_unchecked(asym));
        }
    }
    for l in 1..d {
        let scale = (2.0 / (l as f64 * (l + 1) as f64)).sqrt();
        let mut diag = vec![0.0; d];
        for entry in diag.iter_mut().take(l) {
            *entry = scale;
        }
        diag[l] = -(l as f64) * scale;
        basis.push(HermitianOperator::from_diag(&diag));
    }
    basis
}

/// Decides whether `N` is simulable by `M` via the feasibility LP. A
/// returned map is cleaned of sub-1e-12 dust, row-renormalized, and
/// re-verified to reproduce `N` within `tol` (max norm).
pub fn check_simulable(m: &Povm, n: &Povm, tol: f64) -> Result<SimulabilityResult> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: n.dim(),
        });
    }
    let d = m.dim();
    let o = m.outcomes();
    let k = n.outcomes();
    let basis = hermitian_basis(d);

    // Expansion coefficients of both POVMs in the Hermitian basis.
    let mut m_coeff = vec![vec![0.0; o]; basis.len()];
    let mut n_coeff = vec![vec![0.0; k]; basis.len()];
    for (r, b) in basis.iter().enumerate() {
        for (a, slot) in m_coeff[r].iter_mut().enumerate() {
            *slot = linalg::trace_product(b, m.effect(a))?;
        }
        for (x, slot) in n_coeff[r].iter_mut().enumerate() {
            *slot = linalg::trace_product(b, n.effect(x))?;
        }
    }

    // Variables q(x|a) at index a·k + x.
    let n_vars = o * k;
    let mut constraints = Vec::with_capacity(k * basis.len() + o);
    let mut rhs = Vec::with_capacity(k * basis.len() + o);
    for x in 0..k {
        for r in 0..basis.len() {
            let mut row = vec![0.0; n_vars];
            for a in 0..o {
                row[a * k + x] = m_coeff[r][a];
            }
            constraints.push(row);
            rhs.push(n_coeff[r][x]);
        }
    }
    for a in 0..o {
        let mut row = vec![0.0; n_vars];
        for x in 0..k {
            row[a * k + x] = 1.0;
        }
        constraints.push(row);
        rhs.push(1.0);
    }

    let lp = LinearProgram {
        constraints,
        rhs,
        objective: vec![0.0; n_vars],
    };
    let solution = match simplex::solve(&lp)? {
        LpOutcome::Infeasible => {
            return Ok(SimulabilityResult::NotSimulable {
                witness: None,
                violation: None,
            })
        }
        LpOutcome::Optimal { x, .. } => x,
    };

    // Dust cleanup and exact row normalization.
    let mut table = vec![0.0; n_vars];
    for a in 0..o {
        let mut row_sum = 0.0;
        for x in 0..k {
            let v = solution[a * k + x];
            let v = if v < 1e-12 { 0.0 } else { v };
            table[a * k + x] = v;
            row_sum += v;
        }
        if (row_sum - 1.0).abs() > 1e-6 {
            return Err(Error::NumericalInstability(format!(
                "simplex returned a row summing to {row_sum}"
            )));
        }
        for x in 0..k {
            table[a * k + x] /= row_sum;
        }
    }
    let map = StochasticMap::new(o, k, table)?;

    // Independent post-solve verification.
    let rebuilt = crate::objects::apply_postprocessing(m, &map)?;
    let residual = rebuilt
        .effects()
        .iter()
        .zip(n.effects())
        .map(|(r, t)| r.sub(t).max_norm())
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::NumericalInstability(format!(
            "reproduction residual {residual:.3e} exceeds tolerance {tol:.3e}"
        )));
    }
    Ok(SimulabilityResult::Simulable(map))
}

/// The difference operators `Δ_x` of a candidate map.
pub fn delta_operators(m: &Povm, n: &Povm, p: &StochasticMap) -> Result<DeltaOperators> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: n.dim(),
        });
    }
    if p.rows() != m.outcomes() || p.cols() != n.outcomes() {
        return Err(Error::DimensionMismatch {
            expected: m.outcomes(),
            found: p.rows(),
        });
    }
    let d = m.dim();
    let deltas = (0..n.outcomes())
        .map(|x| {
            let mut acc = ComplexMatrix::zero(d);
            for a in 0..m.outcomes() {
                let weight = p.entry(a, x);
                if weight != 0.0 {
                    acc = acc.add(&m.effect(a).matrix().scale(weight));
                }
            }
            HermitianOperator::new_unchecked(acc.sub(n.effect(x).matrix()))
        })
        .collect();
    Ok(DeltaOperators { deltas })
}

/// Error-probability gap `P^Q(ℰ, 𝕄) − P^Q(ℰ, ℕ)`; positive means `ℰ`
/// witnesses that `𝕄` cannot simulate `ℕ`.
fn violation_gap(e: &Ensemble, m: &Povm, n: &Povm) -> Result<f64> {
    Ok(quantum_error(e, m)?.p_err_quantum - quantum_error(e, n)?.p_err_quantum)
}

/// Witness ensembles built from the positive part of a candidate map's
/// delta operators: the top eigenvector projector at the most violated
/// label, padded with maximally mixed fillers, in a near-point-mass and a
/// uniform-prior variant.
fn delta_guided_candidates(m: &Povm, n: &Povm, p: &StochasticMap) -> Result<Vec<Ensemble>> {
    let d = m.dim();
    let k = n.outcomes();
    if k < 2 {
        return Ok(Vec::new());
    }
    let deltas = delta_operators(m, n, p)?;
    let mut star: Option<(usize, f64, Vec<num_complex::Complex64>)> = None;
    for (x, delta) in deltas.deltas().iter().enumerate() {
        let eig = linalg::eig_hermitian(delta)?;
        let top = eig.eigenvalues[d - 1];
        if top > 1e-12 && star.as_ref().is_none_or(|(_, best, _)| top > *best) {
            star = Some((x, top, eig.eigenvector(d - 1)));
        }
    }
    let Some((x_star, _, vector)) = star else {
        return Ok(Vec::new());
    };

    let filler = HermitianOperator::scaled_identity(d, 1.0 / d as f64);
    let states: Vec<HermitianOperator> = (0..k)
        .map(|x| {
            if x == x_star {
                HermitianOperator::projector(&vector)
            } else {
                filler.clone()
            }
        })
        .collect();

    let total = 1.0 + (k - 1) as f64 * FILLER_PRIOR;
    let point_mass: Vec<f64> = (0..k)
        .map(|x| {
            if x == x_star {
                1.0 / total
            } else {
                FILLER_PRIOR / total
            }
        })
        .collect();
    Ok(vec![
        Ensemble::new_unchecked(states.clone(), point_mass),
        Ensemble::new_unchecked(states, vec![1.0 / k as f64; k]),
    ])
}

/// Searches for an exclusion game on which `𝕄` performs strictly worse
/// than `ℕ`, certifying (constructively) that `𝕄` cannot simulate `ℕ`.
///
/// Candidates, in order: the optimal exclusion game of `ℕ` (whose
/// advantage only `ℕ` can realize), then per restart a random probe
/// ensemble, delta-guided constructions from the probe's optimal
/// assignment and from a random map, and a size-varied random probe. The
/// best gap above [`VIOLATION_MIN`] is returned; `None` after exhausting
/// the restarts proves nothing — the LP verdict remains authoritative.
///
/// Errors with [`Error::InvalidState`] when the pair is in fact simulable.
pub fn find_violating_ensemble(
    m: &Povm,
    n: &Povm,
    restarts: usize,
    seed: u64,
) -> Result<Option<(Ensemble, f64)>> {
    if check_simulable(m, n, crate::Tolerances::default().feas)?.is_simulable() {
        return Err(Error::InvalidState(
            "the pair is simulable; no violating ensemble exists".into(),
        ));
    }
    let d = m.dim();
    let o = m.outcomes();
    let k = n.outcomes();

    let mut best: Option<(Ensemble, f64)> = None;
    let mut consider = |candidate: Ensemble, gap: f64| {
        if best.as_ref().is_none_or(|(_, b)| gap > *b) {
            best = Some((candidate, gap));
        }
    };

    let game_n = optimal_exclusion_game(n)?;
    let gap = violation_gap(&game_n, m, n)?;
    consider(game_n, gap);

    for r in 0..restarts {
        let r = r as u64;
        if k >= 2 {
            let probe = random_ensemble(d, k, derive_seed(seed, 4 * r));
            consider(probe.clone(), violation_gap(&probe, m, n)?);

            let assignment_map = quantum_error(&probe, m)?.optimal_postprocessing(k);
            for candidate in delta_guided_candidates(m, n, &assignment_map)? {
                let gap = violation_gap(&candidate, m, n)?;
                consider(candidate, gap);
            }

            let random_map = random_stochastic_map(o, k, derive_seed(seed, 4 * r + 1));
            for candidate in delta_guided_candidates(m, n, &random_map)? {
                let gap = violation_gap(&candidate, m, n)?;
                consider(candidate, gap);
            }
        }
        let k_var = 2 + (r as usize % (k + 1));
        let varied = random_ensemble(d, k_var, derive_seed(seed, 4 * r + 2));
        consider(varied.clone(), violation_gap(&varied, m, n)?);
    }

    Ok(best.filter(|(_, gap)| *gap > VIOLATION_MIN))
}

/// Result of sampling the game ordering between two measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub samples: usize,
    /// Games where `P^Q(ℰ, 𝕄) > P^Q(ℰ, ℕ)` beyond tolerance.
    pub violations: usize,
    /// Largest positive gap observed (0 when the ordering always held).
    pub max_violation: f64,
}

/// Evaluates `samples` random games against both measurements and reports
/// violations of the ordering `P^Q(ℰ, 𝕄) ≤ P^Q(ℰ, ℕ)`. When `ℕ` is
/// simulable by `𝕄` the count must be zero.
pub fn monotone_audit(m: &Povm, n: &Povm, samples: usize, seed: u64) -> Result<AuditReport> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: n.dim(),
        });
    }
    let d = m.dim();
    let (violations, max_violation) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let k = 2 + i % 3;
            let e = random_ensemble(d, k, derive_seed(seed, i as u64));
            let gap = violation_gap(&e, m, n).expect("dimensions checked upfront");
            (usize::from(gap > AUDIT_TOL), gap.max(0.0))
        })
        .reduce(|| (0, 0.0), |x, y| (x.0 + y.0, x.1.max(y.1)));
    Ok(AuditReport {
        samples,
        violations,
        max_violation,
    })
}
