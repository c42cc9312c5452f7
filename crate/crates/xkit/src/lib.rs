//! Numerical toolkit for the resource theory of measurement informativeness.
//!
//! The crate computes the weight of informativeness of a POVM, evaluates
//! classical and quantum error probabilities in state-exclusion games,
//! derives single-shot exclusion information quantities, and decides
//! whether one measurement can simulate another by classical
//! post-processing. Everything is built on a small dense complex-Hermitian
//! linear algebra layer with explicit tolerances, so results are
//! deterministic and reproducible from a seed.
//!
//! Module map:
//!
//! - [`linalg`] — complex matrices, Hermitian operators, Jacobi eigensolver.
//! - [`objects`] — POVMs, ensembles, stochastic maps, random instances.
//! - [`schema`] — versioned JSON document format for all file I/O.
//! - [`weight`] — weight of informativeness, optimal decomposition, dual states.
//! - [`games`] — state-exclusion error probabilities and optimal games.
//! - [`information`] — exclusion entropies and excludible information.
//! - [`simplex`] — bundled dense two-phase simplex (Bland's rule).
//! - [`simulability`] — simulability decisions, monotone audits, witnesses.
//! - [`cli`] — the `xkit` command-line surface and report format.

pub mod cli;
pub mod games;
pub mod information;
pub mod linalg;
pub mod objects;
pub mod schema;
pub mod simplex;
pub mod simulability;
pub mod weight;

use thiserror::Error as ThisError;

/// Tolerance tiers used throughout the toolkit.
///
/// Three tiers cover, from tightest to loosest: Hermiticity of raw input
/// matrices, positive-semidefiniteness and completeness of validated
/// objects, and reconstruction residuals of LP-derived post-processings.
/// All three can be overridden globally from the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-norm deviation allowed between a matrix and its adjoint.
    pub herm: f64,
    /// Slack allowed below zero for smallest eigenvalues, and for the
    /// max-norm completeness residual of a POVM.
    pub psd: f64,
    /// Max-norm residual allowed when a stochastic map returned by the
    /// simulability LP is re-applied to reproduce the target POVM.
    pub feas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-9,
            psd: 1e-7,
            feas: 1e-6,
        }
    }
}

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("matrix {index:?} is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian {
        /// Index of the offending effect or state, when part of a collection.
        index: Option<usize>,
        deviation: f64,
    },

    #[error("effect {index} is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { index: usize, min_eigenvalue: f64 },

    #[error("effects do not sum to the identity (max deviation {deviation:.3e})")]
    CompletenessViolation { deviation: f64 },

    #[error("state {index} does not have unit trace (trace {trace})")]
    InvalidTrace { index: usize, trace: f64 },

    #[error("invalid probability data: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("normalization block is numerically singular after {attempts} attempts")]
    SingularNormalization { attempts: usize },

    #[error("degenerate game: the smallest prior is zero, so the advantage ratio is undefined")]
    DegenerateGame,

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    ///
    /// 1 = validation/parse failure, 3 = internal numerical failure.
    /// (0 = success and 2 = verification-suite failure are produced by
    /// the CLI itself, not by errors.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. }
            | Error::SingularNormalization { .. }
            | Error::NumericalInstability(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub use games::{classical_error, quantum_error, advantage_ratio, optimal_exclusion_game, GameReport};
pub use information::{
    excludible_information, excludible_information_direct, exclusion_entropy,
    mutual_exclusion_information, ExtendedReal,
};
pub use linalg::{ComplexMatrix, EigenDecomposition, HermitianOperator};
pub use objects::{Ensemble, Povm, StochasticMap};
pub use simulability::{check_simulable, SimulabilityResult};
pub use weight::{dual_optimal_states, woi, woi_decomposition, woi_primal, WeightDecomposition};
