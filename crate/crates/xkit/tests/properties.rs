//! Property-based invariants over randomly generated instances. Each
//! property leans on an independent reference — reconstruction residuals,
//! Bloch-grid scans, exhaustive enumeration, or a feasible point built by
//! hand — rather than re-deriving the implementation's own formulas.

mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use xkit::games::{advantage_ratio, classical_error, quantum_error};
use xkit::information::ExtendedReal;
use xkit::linalg::{eig_hermitian, ComplexMatrix, HermitianOperator};
use xkit::objects::{random_ensemble, random_povm, random_stochastic_map, Povm};
use xkit::simplex::{solve, LinearProgram, LpOutcome};
use xkit::weight::{woi, woi_decomposition, woi_primal};
use xkit::Tolerances;

/// A Hermitian operator with entries of order one, from raw draws.
fn hermitian_from_parts(d: usize, parts: &[f64]) -> HermitianOperator {
    let mut m = ComplexMatrix::zero(d);
    let mut next = parts.iter().copied();
    for i in 0..d {
        for j in i..d {
            let re = next.next().unwrap_or(0.0);
            let im = if i == j { 0.0 } else { next.next().unwrap_or(0.0) };
            m.set(i, j, Complex64::new(re, im));
            if i != j {
                m.set(j, i, Complex64::new(re, -im));
            }
        }
    }
    HermitianOperator::new(m, 1e-9).expect("constructed Hermitian")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs_orthonormally(
        d in 1usize..=5,
        parts in prop::collection::vec(-10.0f64..10.0, 50),
    ) {
        let h = hermitian_from_parts(d, &parts);
        let scale = 1.0 + h.max_norm();
        let eig = eig_hermitian(&h).unwrap();

        prop_assert!(eig.reconstruct().sub(h.matrix()).max_norm() <= 1e-10 * scale);
        for w in eig.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let vtv = eig.vectors.adjoint().mul(&eig.vectors);
        prop_assert!(vtv.sub(&ComplexMatrix::identity(d)).max_norm() <= 1e-12);
        let trace_gap = (eig.eigenvalues.iter().sum::<f64>() - h.trace()).abs();
        prop_assert!(trace_gap <= 1e-11 * scale);
    }

    #[test]
    fn weight_is_bounded_consistent_and_reconstructs(
        d in 2usize..=4,
        o in 2usize..=5,
        seed in any::<u64>(),
    ) {
        let m = random_povm(d, o, seed).unwrap();
        let w = woi(&m).unwrap();
        prop_assert!((0.0..=1.0).contains(&w));
        prop_assert!((w - woi_primal(&m).unwrap().0).abs() <= 1e-10);
        let dec = woi_decomposition(&m).unwrap();
        prop_assert!(dec.residual(&m) <= 1e-8);
    }

    #[test]
    fn closed_form_matches_the_bloch_grid_on_qubits(
        o in 2usize..=4,
        seed in any::<u64>(),
    ) {
        let m = random_povm(2, o, seed).unwrap();
        for effect in m.effects() {
            let exact = xkit::linalg::min_eig(effect).unwrap().0;
            let grid = common::bloch_grid_min_expectation(effect, 120);
            // a Rayleigh quotient can only overshoot λ_min, by O(1/steps²)
            prop_assert!(grid >= exact - 1e-12);
            let spread = effect.max_norm();
            prop_assert!(grid - exact <= 0.01 * (1.0 + spread));
        }
    }

    #[test]
    fn games_sit_between_the_weight_bound_and_one(
        d in 2usize..=3,
        o in 2usize..=4,
        k in 2usize..=4,
        seed in any::<u64>(),
    ) {
        let m = random_povm(d, o, seed).unwrap();
        let e = random_ensemble(d, k, seed.wrapping_add(1));
        let report = quantum_error(&e, &m).unwrap();
        prop_assert!(report.p_err_quantum <= classical_error(&e) + 1e-12);
        let ratio = advantage_ratio(&e, &m).unwrap();
        prop_assert!(ratio <= 1.0 + 1e-12);
        prop_assert!(ratio >= 1.0 - woi(&m).unwrap() - 1e-7);
    }

    #[test]
    fn greedy_game_matches_exhaustive_enumeration(
        d in 2usize..=3,
        o in 2usize..=5,
        k in 2usize..=4,
        seed in any::<u64>(),
    ) {
        let m = random_povm(d, o, seed).unwrap();
        let e = random_ensemble(d, k, seed.wrapping_add(2));
        let greedy = quantum_error(&e, &m).unwrap().p_err_quantum;
        let exhaustive = common::brute_force_quantum_error(&e, &m);
        prop_assert!((greedy - exhaustive).abs() <= 1e-12);
    }

    #[test]
    fn post_processing_never_raises_the_weight(
        d in 2usize..=3,
        o in 2usize..=4,
        k in 2usize..=4,
        seed in any::<u64>(),
    ) {
        let m = random_povm(d, o, seed).unwrap();
        let q = random_stochastic_map(o, k, seed.wrapping_add(3));
        let n = xkit::objects::apply_postprocessing(&m, &q).unwrap();
        prop_assert!(woi(&n).unwrap() <= woi(&m).unwrap() + 1e-8);
    }

    #[test]
    fn generated_povms_revalidate(
        d in 2usize..=4,
        o in 2usize..=5,
        seed in any::<u64>(),
    ) {
        let m = random_povm(d, o, seed).unwrap();
        let rebuilt = Povm::new(m.effects().to_vec(), &Tolerances::default());
        prop_assert!(rebuilt.is_ok());
    }

    #[test]
    fn extended_reals_round_trip_through_json(v in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        for value in [ExtendedReal::Finite(v), ExtendedReal::Infinite] {
            let json = serde_json::to_string(&value).unwrap();
            let back: ExtendedReal = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, value);
        }
    }

    #[test]
    fn simplex_solves_feasible_bounded_programs(
        m in 1usize..=4,
        extra in 0usize..=4,
        entries in prop::collection::vec(-2.0f64..2.0, 40),
        point in prop::collection::vec(0.0f64..2.0, 8),
        costs in prop::collection::vec(0.0f64..1.0, 8),
    ) {
        // b = A·x* for a nonnegative x*, so the program is feasible; a
        // nonnegative cost keeps it bounded below.
        let n = m + extra;
        let constraints: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..n).map(|j| entries[(i * n + j) % entries.len()]).collect())
            .collect();
        let reference: Vec<f64> = (0..n).map(|j| point[j % point.len()]).collect();
        let rhs: Vec<f64> = constraints
            .iter()
            .map(|row| row.iter().zip(&reference).map(|(a, x)| a * x).sum())
            .collect();
        let objective: Vec<f64> = (0..n).map(|j| costs[j % costs.len()]).collect();
        let lp = LinearProgram { constraints: constraints.clone(), rhs: rhs.clone(), objective: objective.clone() };

        let scale = 1.0 + rhs.iter().fold(0.0f64, |acc, b| acc.max(b.abs()));
        match solve(&lp).unwrap() {
            LpOutcome::Optimal { x, objective: value } => {
                for (row, b) in constraints.iter().zip(&rhs) {
                    let lhs: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
                    prop_assert!((lhs - b).abs() <= 1e-6 * scale);
                }
                for v in &x {
                    prop_assert!(*v >= 0.0);
                }
                let reference_value: f64 =
                    objective.iter().zip(&reference).map(|(c, v)| c * v).sum();
                prop_assert!(value <= reference_value + 1e-7 * (1.0 + reference_value.abs()));
            }
            LpOutcome::Infeasible => prop_assert!(false, "feasible by construction"),
        }
    }
}
