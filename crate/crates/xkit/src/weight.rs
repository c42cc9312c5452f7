//! Weight of informativeness.
//!
//! The weight of informativeness of a POVM `𝕄 = {M_a}` is the smallest
//! `w` admitting a split `M_a = (1−w)·q(a)·𝟙 + w·N_a` with `q` a
//! probability distribution and `ℕ` a POVM. The associated primal SDP
//! maximizes `Σ_a q̃(a)` subject to `M_a − q̃(a)·𝟙 ⪰ 0`; the constraints
//! decouple per outcome, so the optimum is attained entrywise at
//! `q̃(a) = max(0, λ_min(M_a))` and no conic solver is needed — only one
//! smallest eigenvalue per effect. The dual minimizes `Σ_a Tr(ρ_a M_a)`
//! over density matrices `ρ_a` and decouples the same way: the per-outcome
//! minimum of a linear functional over density matrices is the smallest
//! eigenvalue, attained on the min-eigenvector projector. Both programs
//! therefore evaluate to `Σ_a λ_min(M_a)`, which makes strong duality
//! directly visible in the code.

use crate::linalg::{self, HermitianOperator};
use crate::objects::Povm;
use crate::Result;

/// Below this weight the resourceful part of the decomposition is
/// undefined and a documented convention kicks in.
const WEIGHT_FLOOR: f64 = 1e-9;

/// The optimal split `M_a = (1−w*)·q*(a)·𝟙 + w*·N*_a`.
#[derive(Debug, Clone)]
pub struct WeightDecomposition {
    /// The weight of informativeness `w* ∈ [0, 1]`.
    pub w_star: f64,
    /// Outcome distribution of the uninformative part.
    pub q_star: Vec<f64>,
    /// The resourceful part `ℕ*`. Conventions at the boundary: for
    /// `w* ≈ 0` this is the input itself, for `w* ≈ 1` the distribution
    /// `q*` is uniform (the uninformative part carries no weight there).
    pub n_star: Povm,
}

impl WeightDecomposition {
    /// Max-norm residual of the reconstruction over all outcomes.
    pub fn residual(&self, m: &Povm) -> f64 {
        let d = m.dim();
        m.effects()
            .iter()
            .enumerate()
            .map(|(a, effect)| {
                let flat = HermitianOperator::scaled_identity(
                    d,
                    (1.0 - self.w_star) * self.q_star[a],
                );
                let rebuilt = flat.add(&self.n_star.effect(a).scale(self.w_star));
                effect.sub(&rebuilt).max_norm()
            })
            .fold(0.0, f64::max)
    }
}

/// The dual-optimal density matrices `ρ_a^𝕄`, one per outcome: the
/// projector onto the min-eigenvector of `M_a`.
#[derive(Debug, Clone)]
pub struct DualStates {
    states: Vec<HermitianOperator>,
}

impl DualStates {
    pub fn states(&self) -> &[HermitianOperator] {
        &self.states
    }

    pub fn into_states(self) -> Vec<HermitianOperator> {
        self.states
    }

    /// The dual objective `Σ_a Tr(ρ_a^𝕄 M_a)`, equal to `1 − woi(M)`.
    pub fn value(&self, m: &Povm) -> Result<f64> {
        let mut total = 0.0;
        for (rho, effect) in self.states.iter().zip(m.effects()) {
            total += linalg::trace_product(rho, effect)?;
        }
        Ok(total)
    }
}

/// Weight of informativeness `1 − Σ_a max(0, λ_min(M_a))`, clamped to
/// `[0, 1]`. Negative eigenvalues within the PSD tolerance are treated as
/// zero so numerical dust cannot push the weight above 1.
pub fn woi(m: &Povm) -> Result<f64> {
    Ok(woi_primal(m)?.0)
}

/// Primal SDP for the weight: maximize `Σ_a q̃(a)` subject to
/// `M_a − q̃(a)·𝟙 ⪰ 0`. Solved exactly per outcome at
/// `q̃(a) = max(0, λ_min(M_a))`; returns `(1 − Σ_a q̃(a), q̃)`.
pub fn woi_primal(m: &Povm) -> Result<(f64, Vec<f64>)> {
    let mut q_tilde = Vec::with_capacity(m.outcomes());
    for effect in m.effects() {
        let (lambda_min, _) = linalg::min_eig(effect)?;
        q_tilde.push(lambda_min.max(0.0));
    }
    let total: f64 = q_tilde.iter().sum();
    Ok(((1.0 - total).clamp(0.0, 1.0), q_tilde))
}

/// Optimal decomposition `M_a = (1−w*)·q*(a)·𝟙 + w*·N*_a`.
///
/// For `w* ≤ 1e-9` the resourceful part is undefined; by convention
/// `q*(a) = Tr(M_a)/d` and `ℕ* = 𝕄`. For `w* ≥ 1 − 1e-9` the
/// uninformative part carries no weight and `q*` is uniform by convention.
pub fn woi_decomposition(m: &Povm) -> Result<WeightDecomposition> {
    let d = m.dim();
    let o = m.outcomes();
    let (w_star, q_tilde) = woi_primal(m)?;

    if w_star <= WEIGHT_FLOOR {
        let q_star = m.effects().iter().map(|e| e.trace() / d as f64).collect();
        return Ok(WeightDecomposition {
            w_star,
            q_star,
            n_star: m.clone(),
        });
    }

    let q_star = if 1.0 - w_star <= WEIGHT_FLOOR {
        vec![1.0 / o as f64; o]
    } else {
        q_tilde.iter().map(|q| q / (1.0 - w_star)).collect()
    };
    let effects = m
        .effects()
        .iter()
        .zip(&q_tilde)
        .map(|(effect, &q)| {
            effect
                .sub(&HermitianOperator::scaled_identity(d, q))
                .scale(1.0 / w_star)
        })
        .collect();
    Ok(WeightDecomposition {
        w_star,
        q_star,
        n_star: Povm::new_unchecked(effects),
    })
}

/// Dual SDP solution: per outcome the minimizer of `Tr(ρ·M_a)` over
/// density matrices, i.e. the projector onto the min-eigenvector of `M_a`
/// (first eigenvector on degeneracies, inherited from the eigensolver's
/// tie-break).
pub fn dual_optimal_states(m: &Povm) -> Result<DualStates> {
    let mut states = Vec::with_capacity(m.outcomes());
    for effect in m.effects() {
        let (_, v) = linalg::min_eig(effect)?;
        states.push(HermitianOperator::projector(&v));
    }
    Ok(DualStates { states })
}
