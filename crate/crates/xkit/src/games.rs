//! State-exclusion games.
//!
//! A game is an ensemble `ℰ = {ρ_x, p(x)}`: a state is drawn with prior
//! `p(x)` and the player must name a label that was *not* sent. Without a
//! measurement the best strategy is to always name the least likely label,
//! so the classical error is `min_x p(x)`. With a measurement `𝕄` the
//! player post-processes the outcome into a label; at fixed `𝕄` the error
//! is linear in the post-processing table with independent simplex
//! constraints per outcome, so an optimal post-processing is deterministic
//! and the minimization decouples:
//!
//! `P^Q = Σ_a min_x p(x)·Tr(M_a ρ_x)`.
//!
//! (Any randomized table is a per-outcome convex mixture of deterministic
//! choices, so it can never beat the best deterministic assignment on a
//! linear objective; the brute-force enumeration over assignments is kept
//! as a test oracle.)

use crate::linalg;
use crate::objects::{Ensemble, Povm, StochasticMap};
use crate::weight::{dual_optimal_states, woi};
use crate::{Error, Result};

/// Outcome of evaluating one exclusion game against one measurement.
#[derive(Debug, Clone)]
pub struct GameReport {
    /// `min_x p(x)` — best error without the measurement.
    pub p_err_classical: f64,
    /// `Σ_a min_x p(x)·Tr(M_a ρ_x)` — best error using the measurement.
    pub p_err_quantum: f64,
    /// The minimizing deterministic assignment `g(a)`, smallest label on
    /// ties.
    pub optimal_assignment: Vec<usize>,
    /// `p_err_quantum / p_err_classical`, or `None` when the classical
    /// error vanishes (the ratio is undefined there).
    pub ratio: Option<f64>,
}

impl GameReport {
    /// The optimal post-processing as a stochastic map, `q(x|a) = δ_{x,g(a)}`.
    pub fn optimal_postprocessing(&self, labels: usize) -> StochasticMap {
        StochasticMap::deterministic(&self.optimal_assignment, labels)
    }
}

/// Classical error probability `min_x p(x)`.
pub fn classical_error(e: &Ensemble) -> f64 {
    e.priors().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Quantum error probability and the optimal deterministic assignment.
pub fn quantum_error(e: &Ensemble, m: &Povm) -> Result<GameReport> {
    if e.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: m.dim(),
        });
    }
    let mut p_err_quantum = 0.0;
    let mut optimal_assignment = Vec::with_capacity(m.outcomes());
    for effect in m.effects() {
        let mut best_x = 0;
        let mut best = f64::INFINITY;
        for (x, state) in e.states().iter().enumerate() {
            let value = e.prior(x) * linalg::trace_product(effect, state)?;
            if value < best {
                best = value;
                best_x = x;
            }
        }
        p_err_quantum += best;
        optimal_assignment.push(best_x);
    }
    let p_err_classical = classical_error(e);
    let ratio = if p_err_classical > 0.0 {
        Some(p_err_quantum / p_err_classical)
    } else {
        None
    };
    Ok(GameReport {
        p_err_classical,
        p_err_quantum,
        optimal_assignment,
        ratio,
    })
}

/// The advantage `P^Q_err / P^C_err` of playing with the measurement.
/// Errors with [`Error::DegenerateGame`] when the smallest prior is zero.
pub fn advantage_ratio(e: &Ensemble, m: &Povm) -> Result<f64> {
    quantum_error(e, m)?.ratio.ok_or(Error::DegenerateGame)
}

/// The game on which `𝕄` achieves its optimal advantage `1 − woi(𝕄)`:
/// the dual-optimal states `ρ_a^𝕄` with uniform priors `1/o`.
pub fn optimal_exclusion_game(m: &Povm) -> Result<Ensemble> {
    let states = dual_optimal_states(m)?.into_states();
    let o = states.len();
    Ok(Ensemble::new_unchecked(states, vec![1.0 / o as f64; o]))
}

/// Convenience wrapper: the advantage ratio of the constructed optimal
/// game, which matches `1 − woi(𝕄)` up to numerical dust.
pub fn optimal_advantage(m: &Povm) -> Result<f64> {
    let game = optimal_exclusion_game(m)?;
    let ratio = advantage_ratio(&game, m)?;
    debug_assert!((ratio - (1.0 - woi(m)?)).abs() <= 1e-7);
    Ok(ratio)
}
