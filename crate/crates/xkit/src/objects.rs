//! Domain data model: POVMs, ensembles, and stochastic maps.
//!
//! All three types validate their defining invariants on construction and
//! are immutable afterwards. Random instances are generated from explicit
//! seeds (ChaCha8), so every run is reproducible bit for bit. Raw matrices
//! coming from files should go through [`validate_povm`] or the typed
//! constructors; violations are reported as errors, never repaired.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, ComplexMatrix, HermitianOperator};
use crate::{Error, Result, Tolerances};

/// Unit-trace slack for ensemble states.
pub const TRACE_TOL: f64 = 1e-8;
/// Normalization slack for priors and stochastic-map rows.
pub const PROB_TOL: f64 = 1e-10;
/// Lower clamp applied to random ensemble priors. The exclusion advantage
/// ratio divides by the smallest prior, so sampled games must keep their
/// classical error bounded away from zero.
pub const PRIOR_CLAMP: f64 = 1e-3;

/// Generation retries before giving up on a singular normalization block.
const MAX_ATTEMPTS: usize = 9; // first try + 8 retries

/// A positive-operator-valued measure: effects `M_a ⪰ 0` with `Σ_a M_a = 𝟙`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<HermitianOperator>,
}

impl Povm {
    /// Validates positivity (within `cfg.psd`) and completeness of
    /// already-Hermitian effects.
    pub fn new(effects: Vec<HermitianOperator>, cfg: &Tolerances) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let dim = effects[0].dim();
        let mut sum = ComplexMatrix::zero(dim);
        for (a, effect) in effects.iter().enumerate() {
            if effect.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: effect.dim(),
                });
            }
            let (min_eigenvalue, _) = linalg::min_eig(effect)?;
            if min_eigenvalue < -cfg.psd {
                return Err(Error::NotPsd {
                    index: a,
                    min_eigenvalue,
                });
            }
            sum = sum.add(effect.matrix());
        }
        let deviation = sum.sub(&ComplexMatrix::identity(dim)).max_norm();
        if deviation > cfg.psd {
            return Err(Error::CompletenessViolation { deviation });
        }
        Ok(Povm { dim, effects })
    }

    /// Wraps effects known to form a POVM by construction (post-processings
    /// of a valid POVM, normalized random blocks). Skips validation.
    pub(crate) fn new_unchecked(effects: Vec<HermitianOperator>) -> Self {
        let dim = effects[0].dim();
        Povm { dim, effects }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes `o`.
    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn effect(&self, a: usize) -> &HermitianOperator {
        &self.effects[a]
    }

    /// The qubit computational-basis measurement `{|0⟩⟨0|, |1⟩⟨1|}`.
    pub fn qubit_z() -> Self {
        Povm::new_unchecked(vec![
            HermitianOperator::from_diag(&[1.0, 0.0]),
            HermitianOperator::from_diag(&[0.0, 1.0]),
        ])
    }

    /// The qubit `{|+⟩⟨+|, |−⟩⟨−|}` measurement.
    pub fn qubit_x() -> Self {
        let half = Complex64::new(0.5, 0.0);
        let plus = ComplexMatrix::from_rows(&[vec![half, half], vec![half, half]]).unwrap();
        let minus = ComplexMatrix::from_rows(&[vec![half, -half], vec![-half, half]]).unwrap();
        Povm::new_unchecked(vec![
            HermitianOperator::new_unchecked(plus),
            HermitianOperator::new_unchecked(minus),
        ])
    }

    /// Uninformative POVM `{q(a)·𝟙}` from a probability distribution.
    pub fn uninformative(dim: usize, probs: &[f64]) -> Result<Self> {
        check_distribution(probs)?;
        Ok(Povm::new_unchecked(
            probs
                .iter()
                .map(|&p| HermitianOperator::scaled_identity(dim, p))
                .collect(),
        ))
    }

    /// Mixes each effect with its own uninformative shadow:
    /// `M_a ↦ (1−ε)·M_a + ε·(Tr M_a / d)·𝟙`. At ε = 1 the result is
    /// uninformative; at ε = 0 it is the original POVM.
    pub fn mix_with_uninformative(&self, epsilon: f64) -> Self {
        assert!((0.0..=1.0).contains(&epsilon), "mixing weight out of range");
        Povm::new_unchecked(
            self.effects
                .iter()
                .map(|m| {
                    let shadow =
                        HermitianOperator::scaled_identity(self.dim, m.trace() / self.dim as f64);
                    m.scale(1.0 - epsilon).add(&shadow.scale(epsilon))
                })
                .collect(),
        )
    }
}

/// A state-exclusion game instance: states `ρ_x` with priors `p(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dim: usize,
    states: Vec<HermitianOperator>,
    priors: Vec<f64>,
}

impl Ensemble {
    /// Validates unit traces, positivity (within `cfg.psd`) and the prior
    /// distribution.
    pub fn new(states: Vec<HermitianOperator>, priors: Vec<f64>, cfg: &Tolerances) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if states.len() != priors.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: priors.len(),
            });
        }
        let dim = states[0].dim();
        for (x, state) in states.iter().enumerate() {
            if state.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: state.dim(),
                });
            }
            let trace = state.trace();
            if (trace - 1.0).abs() > TRACE_TOL {
                return Err(Error::InvalidTrace { index: x, trace });
            }
            let (min_eigenvalue, _) = linalg::min_eig(state)?;
            if min_eigenvalue < -cfg.psd {
                return Err(Error::NotPsd {
                    index: x,
                    min_eigenvalue,
                });
            }
        }
        check_distribution(&priors)?;
        Ok(Ensemble {
            dim,
            states,
            priors,
        })
    }

    pub(crate) fn new_unchecked(states: Vec<HermitianOperator>, priors: Vec<f64>) -> Self {
        let dim = states[0].dim();
        Ensemble {
            dim,
            states,
            priors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of states `k`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    pub fn state(&self, x: usize) -> &HermitianOperator {
        &self.states[x]
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn prior(&self, x: usize) -> f64 {
        self.priors[x]
    }
}

/// A conditional probability table `q(x|a)`: `rows` inputs `a`, `cols`
/// outputs `x`, each row a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMap {
    rows: usize,
    cols: usize,
    table: Vec<f64>, // row-major, entry (a, x) = q(x|a)
}

impl StochasticMap {
    pub fn new(rows: usize, cols: usize, table: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || table.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: table.len(),
            });
        }
        for a in 0..rows {
            let row = &table[a * cols..(a + 1) * cols];
            check_distribution(row)?;
        }
        Ok(StochasticMap { rows, cols, table })
    }

    /// Identity post-processing on `n` outcomes.
    pub fn identity(n: usize) -> Self {
        let mut table = vec![0.0; n * n];
        for a in 0..n {
            table[a * n + a] = 1.0;
        }
        StochasticMap {
            rows: n,
            cols: n,
            table,
        }
    }

    /// Deterministic map `q(x|a) = δ_{x, g(a)}` from an assignment `g`.
    pub fn deterministic(assignment: &[usize], cols: usize) -> Self {
        let rows = assignment.len();
        assert!(rows > 0 && cols > 0, "empty stochastic map");
        let mut table = vec![0.0; rows * cols];
        for (a, &x) in assignment.iter().enumerate() {
            assert!(x < cols, "assignment target out of range");
            table[a * cols + x] = 1.0;
        }
        StochasticMap { rows, cols, table }
    }

    /// Constant map sending every input to the uniform distribution.
    pub fn uniform(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty stochastic map");
        StochasticMap {
            rows,
            cols,
            table: vec![1.0 / cols as f64; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `q(x|a)`.
    #[inline]
    pub fn entry(&self, a: usize, x: usize) -> f64 {
        self.table[a * self.cols + x]
    }

    /// Chains `self` with a second map applied to its output:
    /// `(self ∘ then)(y|a) = Σ_x self(x|a)·then(y|x)`.
    pub fn compose(&self, then: &StochasticMap) -> Result<StochasticMap> {
        if then.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: then.rows,
            });
        }
        let mut table = vec![0.0; self.rows * then.cols];
        for a in 0..self.rows {
            for y in 0..then.cols {
                table[a * then.cols + y] = (0..self.cols)
                    .map(|x| self.entry(a, x) * then.entry(x, y))
                    .sum();
            }
        }
        Ok(StochasticMap {
            rows: self.rows,
            cols: then.cols,
            table,
        })
    }
}

pub(crate) fn check_distribution(probs: &[f64]) -> Result<()> {
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {p}, expected a nonnegative probability"
            )));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Validates a raw effect list into a [`Povm`]: Hermiticity of every
/// candidate (within `cfg.herm`), positivity, and completeness. Errors name
/// the violated invariant and the offending index.
pub fn validate_povm(candidates: &[ComplexMatrix], cfg: &Tolerances) -> Result<Povm> {
    let mut effects = Vec::with_capacity(candidates.len());
    for (a, matrix) in candidates.iter().enumerate() {
        let effect = HermitianOperator::new(matrix.clone(), cfg.herm).map_err(|e| match e {
            Error::NotHermitian { deviation, .. } => Error::NotHermitian {
                index: Some(a),
                deviation,
            },
            other => other,
        })?;
        effects.push(effect);
    }
    Povm::new(effects, cfg)
}

/// Tests whether every effect is proportional to the identity. On success
/// returns the outcome distribution `q(a) = Tr(M_a)/d`.
pub fn is_uninformative(m: &Povm, tol: f64) -> Option<Vec<f64>> {
    let d = m.dim();
    let mut probs = Vec::with_capacity(m.outcomes());
    for effect in m.effects() {
        let q = effect.trace() / d as f64;
        let deviation = effect
            .matrix()
            .sub(&ComplexMatrix::identity(d).scale(q))
            .max_norm();
        if deviation > tol {
            return None;
        }
        probs.push(q);
    }
    Some(probs)
}

/// Classical post-processing `N_x = Σ_a q(x|a)·M_a`.
pub fn apply_postprocessing(m: &Povm, q: &StochasticMap) -> Result<Povm> {
    if q.rows() != m.outcomes() {
        return Err(Error::DimensionMismatch {
            expected: m.outcomes(),
            found: q.rows(),
        });
    }
    let d = m.dim();
    let effects = (0..q.cols())
        .map(|x| {
            let mut n = ComplexMatrix::zero(d);
            for a in 0..m.outcomes() {
                let weight = q.entry(a, x);
                if weight != 0.0 {
                    n = n.add(&m.effect(a).matrix().scale(weight));
                }
            }
            HermitianOperator::new_unchecked(n)
        })
        .collect();
    Ok(Povm::new_unchecked(effects))
}

fn random_gaussian_matrix(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut g = ComplexMatrix::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g.set(i, j, Complex64::new(re, im));
        }
    }
    g
}

/// Hermitian symmetrization `(M + M†)/2`, used to strip round-off dust from
/// products that are Hermitian in exact arithmetic.
fn symmetrize(m: &ComplexMatrix) -> HermitianOperator {
    HermitianOperator::new_unchecked(m.add(&m.adjoint()).scale(0.5))
}

/// Random POVM with `o` outcomes in dimension `d`, deterministic in `seed`.
///
/// Draws `o` complex Gaussian blocks `G_a`, forms `K_a = G_a†·G_a` and
/// normalizes by the total `S = Σ_a K_a`: `M_a = S^{-1/2}·K_a·S^{-1/2}`.
/// If `S` is numerically singular the generator retries with the next seed,
/// up to 8 retries.
pub fn random_povm(d: usize, o: usize, seed: u64) -> Result<Povm> {
    assert!(d >= 2 && o >= 2, "need d >= 2 and o >= 2");
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let blocks: Vec<ComplexMatrix> = (0..o)
            .map(|_| {
                let g = random_gaussian_matrix(d, &mut rng);
                g.adjoint().mul(&g)
            })
            .collect();
        let mut sum = ComplexMatrix::zero(d);
        for k in &blocks {
            sum = sum.add(k);
        }
        let eig = linalg::eig_hermitian(&HermitianOperator::new_unchecked(sum))?;
        let lambda_max = eig.eigenvalues[d - 1];
        if eig.eigenvalues[0] <= 1e-12 * lambda_max.max(f64::MIN_POSITIVE) {
            continue;
        }
        let mut inv_sqrt = ComplexMatrix::zero(d);
        for i in 0..d {
            let vi = eig.eigenvector(i);
            inv_sqrt = inv_sqrt.add(&ComplexMatrix::outer(&vi).scale(1.0 / eig.eigenvalues[i].sqrt()));
        }
        let effects = blocks
            .iter()
            .map(|k| symmetrize(&inv_sqrt.mul(k).mul(&inv_sqrt)))
            .collect();
        return Ok(Povm::new_unchecked(effects));
    }
    Err(Error::SingularNormalization {
        attempts: MAX_ATTEMPTS,
    })
}

/// Random rank-1 projective measurement: `d` orthonormal vectors from
/// Gram–Schmidt on a seeded Gaussian matrix, one projector per vector.
pub fn random_projective_povm(d: usize, seed: u64) -> Result<Povm> {
    assert!(d >= 2, "need d >= 2");
    'attempt: for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let g = random_gaussian_matrix(d, &mut rng);
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(d);
        for a in 0..d {
            let mut v: Vec<Complex64> = (0..d).map(|i| g.entry(i, a)).collect();
            for u in &basis {
                let overlap: Complex64 = u.iter().zip(&v).map(|(ui, vi)| ui.conj() * vi).sum();
                for i in 0..d {
                    v[i] -= overlap * u[i];
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue 'attempt;
            }
            for z in &mut v {
                *z /= norm;
            }
            basis.push(v);
        }
        let effects = basis
            .iter()
            .map(|v| HermitianOperator::projector(v))
            .collect();
        return Ok(Povm::new_unchecked(effects));
    }
    Err(Error::SingularNormalization {
        attempts: MAX_ATTEMPTS,
    })
}

/// Random exclusion-game ensemble, deterministic in `seed`: `k` normalized
/// Wishart states and uniform-then-normalized priors, each prior clamped to
/// at least [`PRIOR_CLAMP`] before the final renormalization.
pub fn random_ensemble(d: usize, k: usize, seed: u64) -> Ensemble {
    assert!(d >= 2 && k >= 1, "need d >= 2 and k >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<HermitianOperator> = (0..k)
        .map(|_| {
            let g = random_gaussian_matrix(d, &mut rng);
            let w = g.adjoint().mul(&g);
            let trace = w.trace().re;
            symmetrize(&w.scale(1.0 / trace))
        })
        .collect();
    let mut priors: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let total: f64 = priors.iter().sum();
    if total <= 0.0 {
        priors = vec![1.0 / k as f64; k];
    } else {
        for p in &mut priors {
            *p /= total;
        }
    }
    for p in &mut priors {
        *p = p.max(PRIOR_CLAMP);
    }
    let clamped: f64 = priors.iter().sum();
    for p in &mut priors {
        *p /= clamped;
    }
    Ensemble::new_unchecked(states, priors)
}

/// Random stochastic map with `rows` inputs and `cols` outputs: uniform
/// (0,1) draws per entry, rows normalized.
pub fn random_stochastic_map(rows: usize, cols: usize, seed: u64) -> StochasticMap {
    assert!(rows > 0 && cols > 0, "empty stochastic map");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = vec![0.0; rows * cols];
    for a in 0..rows {
        let row = &mut table[a * cols..(a + 1) * cols];
        for q in row.iter_mut() {
            *q = rng.random::<f64>();
        }
        let total: f64 = row.iter().sum();
        if total <= 0.0 {
            row.fill(1.0 / cols as f64);
        } else {
            for q in row.iter_mut() {
                *q /= total;
            }
        }
    }
    StochasticMap {
        rows,
        cols,
        table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn validate_accepts_projective_pair() {
        let candidates = vec![
            ComplexMatrix::from_diag(&[1.0, 0.0]),
            ComplexMatrix::from_diag(&[0.0, 1.0]),
        ];
        let povm = validate_povm(&candidates, &tol()).unwrap();
        assert_eq!(povm.outcomes(), 2);
        assert_eq!(povm.dim(), 2);
    }

    #[test]
    fn validate_accepts_uninformative() {
        let candidates = vec![
            ComplexMatrix::identity(2).scale(0.3),
            ComplexMatrix::identity(2).scale(0.7),
        ];
        assert!(validate_povm(&candidates, &tol()).is_ok());
    }

    #[test]
    fn validate_rejects_incomplete() {
        let candidates = vec![
            ComplexMatrix::from_diag(&[1.0, 0.0]),
            ComplexMatrix::from_diag(&[1.0, 0.0]),
        ];
        assert!(matches!(
            validate_povm(&candidates, &tol()),
            Err(Error::CompletenessViolation { .. })
        ));
    }

    #[test]
    fn validate_rejects_negative_effect() {
        let candidates = vec![
            ComplexMatrix::from_diag(&[1.2, 0.0]),
            ComplexMatrix::from_diag(&[-0.2, 1.0]),
        ];
        assert!(matches!(
            validate_povm(&candidates, &tol()),
            Err(Error::NotPsd { index: 1, .. })
        ));
    }

    #[test]
    fn uninformative_distribution_is_recovered() {
        let m = Povm::uninformative(2, &[0.3, 0.7]).unwrap();
        let q = is_uninformative(&m, 1e-6).unwrap();
        assert!((q[0] - 0.3).abs() < 1e-12 && (q[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn projective_is_informative() {
        assert!(is_uninformative(&Povm::qubit_z(), 1e-6).is_none());
    }

    #[test]
    fn full_mixing_is_uninformative() {
        let m = Povm::qubit_z().mix_with_uninformative(1.0);
        let q = is_uninformative(&m, 1e-6).unwrap();
        assert!((q[0] - 0.5).abs() < 1e-12 && (q[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_postprocessing_is_noop() {
        let m = random_povm(2, 3, 5).unwrap();
        let n = apply_postprocessing(&m, &StochasticMap::identity(3)).unwrap();
        for (ma, na) in m.effects().iter().zip(n.effects()) {
            assert!(ma.matrix().sub(na.matrix()).max_norm() < 1e-15);
        }
    }

    #[test]
    fn uniform_postprocessing_is_uninformative() {
        let m = random_povm(2, 3, 6).unwrap();
        let n = apply_postprocessing(&m, &StochasticMap::uniform(3, 4)).unwrap();
        let q = is_uninformative(&n, 1e-9).unwrap();
        for &p in &q {
            assert!((p - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn merging_all_outcomes_gives_identity() {
        let merge = StochasticMap::deterministic(&[0, 0], 1);
        let n = apply_postprocessing(&Povm::qubit_z(), &merge).unwrap();
        assert_eq!(n.outcomes(), 1);
        assert!(
            n.effect(0)
                .matrix()
                .sub(&ComplexMatrix::identity(2))
                .max_norm()
                < 1e-15
        );
    }

    #[test]
    fn composition_matches_sequential_postprocessing() {
        let m = random_povm(3, 4, 17).unwrap();
        let q1 = random_stochastic_map(4, 3, 18);
        let q2 = random_stochastic_map(3, 2, 19);
        let sequential = apply_postprocessing(&apply_postprocessing(&m, &q1).unwrap(), &q2).unwrap();
        let composed = apply_postprocessing(&m, &q1.compose(&q2).unwrap()).unwrap();
        for (a, b) in sequential.effects().iter().zip(composed.effects()) {
            assert!(a.matrix().sub(b.matrix()).max_norm() <= 1e-10);
        }
    }

    #[test]
    fn random_povm_is_deterministic_and_valid() {
        let m1 = random_povm(2, 2, 1).unwrap();
        let m2 = random_povm(2, 2, 1).unwrap();
        assert_eq!(m1, m2);
        let candidates: Vec<ComplexMatrix> =
            m1.effects().iter().map(|e| e.matrix().clone()).collect();
        assert!(validate_povm(&candidates, &tol()).is_ok());
    }

    #[test]
    fn random_povm_varies_with_seed() {
        assert_ne!(random_povm(2, 2, 1).unwrap(), random_povm(2, 2, 2).unwrap());
    }

    #[test]
    fn random_projective_effects_are_orthogonal_projectors() {
        let m = random_projective_povm(3, 42).unwrap();
        let candidates: Vec<ComplexMatrix> =
            m.effects().iter().map(|e| e.matrix().clone()).collect();
        assert!(validate_povm(&candidates, &tol()).is_ok());
        for e in m.effects() {
            // idempotent and rank 1
            let sq = e.matrix().mul(e.matrix());
            assert!(sq.sub(e.matrix()).max_norm() < 1e-12);
            assert!((e.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_ensemble_is_deterministic_and_valid() {
        let e1 = random_ensemble(3, 4, 11);
        let e2 = random_ensemble(3, 4, 11);
        assert_eq!(e1, e2);
        let rebuilt = Ensemble::new(e1.states().to_vec(), e1.priors().to_vec(), &tol());
        assert!(rebuilt.is_ok());
    }

    #[test]
    fn random_ensemble_priors_respect_clamp() {
        for seed in 0..20 {
            let k = 2 + (seed as usize % 4);
            let e = random_ensemble(2, k, seed);
            let bound = PRIOR_CLAMP / (1.0 + k as f64 * PRIOR_CLAMP);
            for &p in e.priors() {
                assert!(p >= bound - 1e-15, "prior {p} below clamp bound {bound}");
            }
        }
    }

    #[test]
    fn random_stochastic_map_rows_normalize() {
        let q = random_stochastic_map(3, 5, 7);
        for a in 0..3 {
            let total: f64 = (0..5).map(|x| q.entry(a, x)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
