//! Single-shot exclusion information.
//!
//! The exclusion entropy of a distribution is `H_exc(X) = −log₂ min_x p(x)`
//! — the order minus-infinity Rényi entropy, the number of bits by which
//! the best excluder's error falls short of certainty. Conditioning on side
//! information `G` replaces the minimal mass by `Σ_g min_x p(x,g)`. Their
//! difference, the mutual exclusion information, measures how much easier
//! exclusion becomes given `G`.
//!
//! A measurement `𝕄` induces the quantum-to-classical channel
//! `Λ_𝕄(ρ) = Σ_a Tr(M_a ρ)·|a⟩⟨a|`; its output is diagonal, so any
//! measurement on the output acts only through the stochastic map
//! `d(g|a) = ⟨a|D_g|a⟩` and decoders are modeled as stochastic maps
//! without loss of generality. The excludible information of `Λ_𝕄` — the
//! best mutual exclusion information over input ensembles and decoders —
//! has the closed form `−log₂(1 − woi(𝕄))`; [`excludible_information_direct`]
//! re-derives it by explicit search for cross-checking.
//!
//! All logarithms are base 2. Infinite values (perfect exclusion) use the
//! explicit [`ExtendedReal::Infinite`] tag; infinity compares greater than
//! every finite value, and infinity minus a finite value is infinity.

use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::games::{classical_error, quantum_error};
use crate::linalg;
use crate::objects::{
    self, random_ensemble, random_stochastic_map, Ensemble, Povm, StochasticMap, PROB_TOL,
};
use crate::weight::woi;
use crate::{Error, Result};

/// Probability masses at or below this threshold are treated as exactly
/// zero when deciding whether an entropy is infinite. A mathematically
/// vanishing mass is computed as a sum of products of Born probabilities
/// and decoder weights, so it arrives as round-off dust of order 1e-16;
/// without the threshold, perfect exclusion would be reported as ~53 bits
/// instead of infinity.
pub const ZERO_MASS_TOL: f64 = 1e-12;

/// A real number or positive infinity, serialized as `{"finite": x}` or
/// `{"inf": true}` — never as a sentinel number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(*x),
            ExtendedReal::Infinite => None,
        }
    }

    /// Larger of two values; infinity dominates everything finite.
    pub fn max(self, other: ExtendedReal) -> ExtendedReal {
        match (self, other) {
            (ExtendedReal::Infinite, _) | (_, ExtendedReal::Infinite) => ExtendedReal::Infinite,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a.max(b)),
        }
    }

    /// True when both are infinite or both are finite within `tol`.
    pub fn approx_eq(&self, other: &ExtendedReal, tol: f64) -> bool {
        match (self, other) {
            (ExtendedReal::Infinite, ExtendedReal::Infinite) => true,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(1))?;
        match self {
            ExtendedReal::Finite(x) => map.serialize_entry("finite", x)?,
            ExtendedReal::Infinite => map.serialize_entry("inf", &true)?,
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtendedRealVisitor;

        impl<'de> Visitor<'de> for ExtendedRealVisitor {
            type Value = ExtendedReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map with key \"finite\" or \"inf\"")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<ExtendedReal, A::Error> {
                let mut value = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "finite" => value = Some(ExtendedReal::Finite(map.next_value()?)),
                        "inf" => {
                            let flag: bool = map.next_value()?;
                            if !flag {
                                return Err(de::Error::custom("\"inf\" must be true"));
                            }
                            value = Some(ExtendedReal::Infinite);
                        }
                        other => return Err(de::Error::unknown_field(other, &["finite", "inf"])),
                    }
                }
                value.ok_or_else(|| de::Error::custom("missing \"finite\" or \"inf\""))
            }
        }

        deserializer.deserialize_map(ExtendedRealVisitor)
    }
}

/// A joint distribution `p(x, g)` over state labels and decoder outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize, // labels x
    cols: usize, // decoder outputs g
    table: Vec<f64>,
}

impl JointDistribution {
    /// Validates nonnegativity and normalization (within 1e-10).
    pub fn new(rows: usize, cols: usize, table: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || table.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: table.len(),
            });
        }
        for (i, &p) in table.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "joint entry {i} is {p}, expected a nonnegative probability"
                )));
            }
        }
        let total: f64 = table.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!(
                "joint entries sum to {total}, expected 1"
            )));
        }
        Ok(JointDistribution { rows, cols, table })
    }

    fn new_unchecked(rows: usize, cols: usize, table: Vec<f64>) -> Self {
        JointDistribution { rows, cols, table }
    }

    /// Number of state labels `x`.
    pub fn labels(&self) -> usize {
        self.rows
    }

    /// Number of decoder outputs `g`.
    pub fn outputs(&self) -> usize {
        self.cols
    }

    /// `p(x, g)`.
    #[inline]
    pub fn entry(&self, x: usize, g: usize) -> f64 {
        self.table[x * self.cols + g]
    }

    /// Marginal over the outputs: `p(x) = Σ_g p(x, g)`.
    pub fn marginal_labels(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|x| (0..self.cols).map(|g| self.entry(x, g)).sum())
            .collect()
    }
}

/// Exclusion entropy `−log₂ min_x p(x)`; infinite when some mass vanishes.
pub fn exclusion_entropy(probs: &[f64]) -> Result<ExtendedReal> {
    objects::check_distribution(probs)?;
    let min = probs.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= ZERO_MASS_TOL {
        Ok(ExtendedReal::Infinite)
    } else {
        Ok(ExtendedReal::Finite(-min.log2()))
    }
}

/// Conditional exclusion entropy `−log₂ Σ_g min_x p(x, g)`.
pub fn conditional_exclusion_entropy(joint: &JointDistribution) -> ExtendedReal {
    let mass: f64 = (0..joint.outputs())
        .map(|g| {
            (0..joint.labels())
                .map(|x| joint.entry(x, g))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    if mass <= ZERO_MASS_TOL {
        ExtendedReal::Infinite
    } else {
        ExtendedReal::Finite(-mass.log2())
    }
}

/// Joint distribution of (state label, decoder output) when `ℰ` is sent
/// through the measurement channel of `𝕄` and the outcome is decoded:
/// `p(x, g) = p(x)·Σ_a Tr(M_a ρ_x)·d(g|a)`.
///
/// Born probabilities that come out as tiny negatives (PSD round-off) are
/// clamped to zero; the table is otherwise reported as computed, so its
/// total inherits the trace accuracy of the input states.
pub fn qc_channel_joint(
    e: &Ensemble,
    m: &Povm,
    decoder: &StochasticMap,
) -> Result<JointDistribution> {
    if e.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: m.dim(),
        });
    }
    if decoder.rows() != m.outcomes() {
        return Err(Error::DimensionMismatch {
            expected: m.outcomes(),
            found: decoder.rows(),
        });
    }
    let k = e.len();
    let outputs = decoder.cols();
    let mut table = vec![0.0; k * outputs];
    for (x, state) in e.states().iter().enumerate() {
        let born: Vec<f64> = m
            .effects()
            .iter()
            .map(|effect| linalg::trace_product(effect, state).map(|p| p.max(0.0)))
            .collect::<Result<_>>()?;
        for g in 0..outputs {
            let channel: f64 = (0..m.outcomes()).map(|a| born[a] * decoder.entry(a, g)).sum();
            table[x * outputs + g] = e.prior(x) * channel;
        }
    }
    Ok(JointDistribution::new_unchecked(k, outputs, table))
}

/// Mutual exclusion information `H_exc(X|G) − H_exc(X)` of the decoded
/// measurement record about the state label.
pub fn mutual_exclusion_information(
    e: &Ensemble,
    m: &Povm,
    decoder: &StochasticMap,
) -> Result<ExtendedReal> {
    let min_prior = classical_error(e);
    if min_prior <= ZERO_MASS_TOL {
        return Err(Error::DegenerateGame);
    }
    let joint = qc_channel_joint(e, m, decoder)?;
    match conditional_exclusion_entropy(&joint) {
        ExtendedReal::Infinite => Ok(ExtendedReal::Infinite),
        ExtendedReal::Finite(h_cond) => Ok(ExtendedReal::Finite(h_cond + min_prior.log2())),
    }
}

/// Excludible information of the measurement channel, closed form:
/// `−log₂(1 − woi(𝕄))`, infinite at maximal weight.
pub fn excludible_information(m: &Povm) -> Result<ExtendedReal> {
    let w = woi(m)?;
    if w >= 1.0 - 1e-9 {
        Ok(ExtendedReal::Infinite)
    } else {
        // the + 0.0 maps a −0.0 at w = 0 to plain zero
        Ok(ExtendedReal::Finite(-(1.0 - w).log2() + 0.0))
    }
}

/// Search-based estimate of the excludible information.
///
/// Evaluates the mutual exclusion information on (a) the constructed
/// optimal exclusion game of `𝕄`, decoded by the game's own optimal
/// assignment, and (b) `trials` random (ensemble, decoder) pairs — each
/// random ensemble is also tried with its best deterministic decoder —
/// and returns the maximum. Construction (a) attains the closed form, so
/// the estimate matches [`excludible_information`] up to numerical dust;
/// the random trials can only fall below it (data processing).
///
/// The defining maximization ranges over ensembles of unbounded size; the
/// random search covers `k ≤ o + 2` states, which the closed form
/// guarantees is enough because (a) alone is optimal.
pub fn excludible_information_direct(m: &Povm, trials: usize, seed: u64) -> Result<ExtendedReal> {
    assert!(trials >= 1, "need at least one trial");
    let d = m.dim();
    let o = m.outcomes();

    // (a) the theory-backed construction
    let game = crate::games::optimal_exclusion_game(m)?;
    let report = quantum_error(&game, m)?;
    let decoder = report.optimal_postprocessing(game.len());
    let mut best = mutual_exclusion_information(&game, m, &decoder)?;

    // (b) random search
    for trial in 0..trials {
        let k = 2 + (trial % (o + 1)); // k ranges over 2..=o+2
        let e = random_ensemble(d, k, derive_seed(seed, 2 * trial as u64));
        let random_decoder = random_stochastic_map(o, k, derive_seed(seed, 2 * trial as u64 + 1));
        best = best.max(mutual_exclusion_information(&e, m, &random_decoder)?);

        let tuned = quantum_error(&e, m)?.optimal_postprocessing(k);
        best = best.max(mutual_exclusion_information(&e, m, &tuned)?);
    }
    Ok(best)
}

/// Splits one seed into independent streams, one per tagged consumer.
pub(crate) fn derive_seed(seed: u64, tag: u64) -> u64 {
    seed.wrapping_mul(6364136223846793005)
        .wrapping_add(tag.wrapping_mul(1442695040888963407))
}
