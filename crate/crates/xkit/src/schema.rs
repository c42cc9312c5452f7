//! Versioned JSON document format for all file I/O.
//!
//! Every file the toolkit reads or writes is a single JSON object carrying
//! `"schema_version": 1` and a `"kind"` discriminator — one of `"povm"`,
//! `"ensemble"`, `"stochastic_map"`, or `"report"`. Complex scalars are
//! two-element arrays `[re, im]`, matrices are row-major nested arrays of
//! those pairs. Raw documents convert into validated domain values through
//! the `to_*` methods, which report violations with the offending field
//! path; nothing is silently repaired.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::ComplexMatrix;
use crate::objects::{validate_povm, Ensemble, Povm, StochasticMap};
use crate::{Error, Result, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;

/// Row-major matrix of `[re, im]` pairs as it appears on disk.
pub type RawMatrix = Vec<Vec<Complex64>>;

/// Any document the toolkit exchanges through files or standard output.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Povm(PovmDoc),
    Ensemble(EnsembleDoc),
    StochasticMap(StochasticMapDoc),
    Report(crate::cli::Report),
}

impl Document {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Document::Povm(_) => "povm",
            Document::Ensemble(_) => "ensemble",
            Document::StochasticMap(_) => "stochastic_map",
            Document::Report(_) => "report",
        }
    }

    fn schema_version(&self) -> u32 {
        match self {
            Document::Povm(d) => d.schema_version,
            Document::Ensemble(d) => d.schema_version,
            Document::StochasticMap(d) => d.schema_version,
            Document::Report(r) => r.schema_version,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmDoc {
    pub schema_version: u32,
    pub dim: usize,
    pub effects: Vec<RawMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleDoc {
    pub schema_version: u32,
    pub dim: usize,
    pub states: Vec<RawMatrix>,
    pub priors: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StochasticMapDoc {
    pub schema_version: u32,
    pub rows: usize,
    pub cols: usize,
    pub table: Vec<Vec<f64>>,
}

fn validation(path: impl Into<String>, message: impl ToString) -> Error {
    Error::Validation {
        path: path.into(),
        message: message.to_string(),
    }
}

fn raw_to_matrix(raw: &RawMatrix, expected_dim: usize, path: &str) -> Result<ComplexMatrix> {
    if raw.len() != expected_dim {
        return Err(validation(
            path,
            format!("expected {expected_dim} rows, found {}", raw.len()),
        ));
    }
    ComplexMatrix::from_rows(raw).map_err(|e| validation(path, e))
}

fn matrix_to_raw(m: &ComplexMatrix) -> RawMatrix {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.entry(i, j)).collect())
        .collect()
}

impl PovmDoc {
    pub fn from_povm(p: &Povm) -> Self {
        PovmDoc {
            schema_version: SCHEMA_VERSION,
            dim: p.dim(),
            effects: p.effects().iter().map(|e| matrix_to_raw(e.matrix())).collect(),
        }
    }

    pub fn to_povm(&self, cfg: &Tolerances) -> Result<Povm> {
        if self.effects.is_empty() {
            return Err(validation("effects", "a POVM needs at least one effect"));
        }
        let mut matrices = Vec::with_capacity(self.effects.len());
        for (a, raw) in self.effects.iter().enumerate() {
            matrices.push(raw_to_matrix(raw, self.dim, &format!("effects[{a}]"))?);
        }
        validate_povm(&matrices, cfg).map_err(|e| match e {
            Error::NotHermitian {
                index: Some(a),
                deviation,
            } => validation(
                format!("effects[{a}]"),
                format!("not Hermitian (max deviation {deviation:.3e})"),
            ),
            Error::NotPsd {
                index,
                min_eigenvalue,
            } => validation(
                format!("effects[{index}]"),
                format!("not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})"),
            ),
            Error::CompletenessViolation { deviation } => validation(
                "effects",
                format!("effects do not sum to the identity (max deviation {deviation:.3e})"),
            ),
            other => validation("effects", other),
        })
    }
}

impl EnsembleDoc {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        EnsembleDoc {
            schema_version: SCHEMA_VERSION,
            dim: e.dim(),
            states: e.states().iter().map(|s| matrix_to_raw(s.matrix())).collect(),
            priors: e.priors().to_vec(),
        }
    }

    pub fn to_ensemble(&self, cfg: &Tolerances) -> Result<Ensemble> {
        if self.states.is_empty() {
            return Err(validation("states", "an ensemble needs at least one state"));
        }
        let mut states = Vec::with_capacity(self.states.len());
        for (x, raw) in self.states.iter().enumerate() {
            let path = format!("states[{x}]");
            let matrix = raw_to_matrix(raw, self.dim, &path)?;
            states.push(
                crate::linalg::HermitianOperator::new(matrix, cfg.herm)
                    .map_err(|e| validation(&path, e))?,
            );
        }
        Ensemble::new(states, self.priors.clone(), cfg).map_err(|e| match e {
            Error::InvalidTrace { index, trace } => validation(
                format!("states[{index}]"),
                format!("trace is {trace}, expected 1"),
            ),
            Error::NotPsd {
                index,
                min_eigenvalue,
            } => validation(
                format!("states[{index}]"),
                format!("not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})"),
            ),
            Error::InvalidDistribution(msg) => validation("priors", msg),
            Error::DimensionMismatch { expected, found } => validation(
                "priors",
                format!("expected {expected} entries, found {found}"),
            ),
            other => validation("states", other),
        })
    }
}

impl StochasticMapDoc {
    pub fn from_map(q: &StochasticMap) -> Self {
        StochasticMapDoc {
            schema_version: SCHEMA_VERSION,
            rows: q.rows(),
            cols: q.cols(),
            table: (0..q.rows())
                .map(|a| (0..q.cols()).map(|x| q.entry(a, x)).collect())
                .collect(),
        }
    }

    pub fn to_map(&self) -> Result<StochasticMap> {
        if self.table.len() != self.rows {
            return Err(validation(
                "table",
                format!("expected {} rows, found {}", self.rows, self.table.len()),
            ));
        }
        let mut flat = Vec::with_capacity(self.rows * self.cols);
        for (a, row) in self.table.iter().enumerate() {
            if row.len() != self.cols {
                return Err(validation(
                    format!("table[{a}]"),
                    format!("expected {} entries, found {}", self.cols, row.len()),
                ));
            }
            flat.extend_from_slice(row);
        }
        StochasticMap::new(self.rows, self.cols, flat)
            .map_err(|e| validation("table", e))
    }
}

/// Reads and version-checks a document.
pub fn load_document(path: &Path) -> Result<Document> {
    let bytes = fs::read(path)?;
    let doc: Document = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if doc.schema_version() != SCHEMA_VERSION {
        return Err(validation(
            "schema_version",
            format!(
                "unsupported version {} (this build reads version {SCHEMA_VERSION})",
                doc.schema_version()
            ),
        ));
    }
    Ok(doc)
}

/// Pretty-printed JSON plus trailing newline; byte-identical for equal
/// documents, suitable for files and standard output.
pub fn to_json(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn write_document(path: &Path, doc: &Document) -> Result<()> {
    fs::write(path, to_json(doc))?;
    Ok(())
}

/// Hex SHA-256 of a file's raw bytes, recorded in report inputs.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
