//! Dense complex-Hermitian linear algebra with explicit tolerances.
//!
//! Matrices are stored row-major as flat `Vec<Complex64>` and are always
//! square; the toolkit never needs rectangular matrices or dimensions
//! beyond ~16. The eigensolver is a cyclic Jacobi iteration adapted to
//! complex Hermitian matrices: each off-diagonal entry `A_pq = r·e^{iφ}`
//! is annihilated by a two-sided unitary rotation obtained by first
//! absorbing the phase `φ` into the q-th basis vector and then applying
//! the classic real Jacobi rotation. Jacobi is slow at large dimension
//! but dependency-free, deterministic, and accurate to machine precision
//! at the sizes used here.

use num_complex::Complex64;

use crate::{Error, Result};

/// A square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of size `dim × dim`.
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix of size `dim × dim`.
    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zero(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from nested rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(ComplexMatrix { dim, entries })
    }

    /// Diagonal matrix with the given real diagonal.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = ComplexMatrix::zero(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        m
    }

    /// Outer product `v·v†` of a (not necessarily normalized) vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = ComplexMatrix::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.dim + j] = value;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = ComplexMatrix::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(j, i, self.entry(i, j).conj());
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.scale_complex(Complex64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        let d = self.dim;
        let mut m = ComplexMatrix::zero(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.entry(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let v = m.entry(i, j) + aik * other.entry(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Largest entry modulus (max norm).
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max-norm deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        dev
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// A validated Hermitian matrix; the carrier for effects, states, and
/// difference operators.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity within `herm_tol` (max norm).
    pub fn new(matrix: ComplexMatrix, herm_tol: f64) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if !matrix.is_finite() || deviation > herm_tol {
            return Err(Error::NotHermitian {
                index: None,
                deviation,
            });
        }
        Ok(HermitianOperator { matrix })
    }

    /// Wraps a matrix that is Hermitian by construction (sums, real scalings
    /// and conjugations of Hermitian matrices). Callers are responsible for
    /// that guarantee; no check is performed.
    pub fn new_unchecked(matrix: ComplexMatrix) -> Self {
        HermitianOperator { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// `factor · 𝟙`.
    pub fn scaled_identity(dim: usize, factor: f64) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::identity(dim).scale(factor),
        }
    }

    pub fn zero(dim: usize) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::zero(dim),
        }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::from_diag(diag),
        }
    }

    /// Rank-1 projector `v·v†/‖v‖²` onto the direction of `v`.
    pub fn projector(v: &[Complex64]) -> Self {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!(norm_sqr > 0.0, "cannot project onto the zero vector");
        HermitianOperator {
            matrix: ComplexMatrix::outer(v).scale(1.0 / norm_sqr),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.entry(i, j)
    }

    /// Real trace (the imaginary part of a Hermitian trace is zero).
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn max_norm(&self) -> f64 {
        self.matrix.max_norm()
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianOperator {
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianOperator {
            matrix: self.matrix.sub(&other.matrix),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianOperator {
            matrix: self.matrix.scale(factor),
        }
    }
}

/// Result of [`eig_hermitian`]: `H = Σ_i λ_i v_i v_i†` with ascending `λ_i`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues, sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose i-th column is the eigenvector of `eigenvalues[i]`.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The i-th eigenvector (column of the unitary).
    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        (0..self.vectors.dim())
            .map(|row| self.vectors.entry(row, i))
            .collect()
    }

    /// Re-multiplies `Σ_i λ_i v_i v_i†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..d {
            for i in 0..d {
                let v = scaled.entry(i, j) * self.eigenvalues[j];
                scaled.set(i, j, v);
            }
        }
        scaled.mul(&self.vectors.adjoint())
    }
}

/// Largest off-diagonal modulus of a working matrix.
fn max_off_diagonal(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut m: f64 = 0.0;
    for p in 0..d {
        for q in (p + 1)..d {
            m = m.max(a.entry(p, q).norm());
        }
    }
    m
}

/// One Jacobi rotation annihilating `A_pq`, applied two-sided to `a` and
/// accumulated into the columns of `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.entry(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    // A_pq = r·e^{iφ}; diag(1, e^{-iφ}) on (p,q) makes the 2×2 block real
    // symmetric, then the classic rotation with tan 2x = 2r/(A_qq - A_pp)
    // zeroes it. The combined unitary is
    //   U = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]]  acting on coordinates (p, q).
    let e_minus = (apq / r).conj(); // e^{-iφ}
    let e_plus = e_minus.conj();
    let theta = (a.entry(q, q).re - a.entry(p, p).re) / (2.0 * r);
    let t = if theta.abs() > 1e154 {
        // avoid overflow in theta²; the limit of the closed form
        0.5 / theta
    } else {
        let sign = if theta < 0.0 { -1.0 } else { 1.0 };
        sign / (theta.abs() + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let d = a.dim();
    // A ← A·U (columns p, q), then A ← U†·A (rows p, q); V ← V·U.
    for i in 0..d {
        let aip = a.entry(i, p);
        let aiq = e_minus * a.entry(i, q);
        a.set(i, p, c * aip - s * aiq);
        a.set(i, q, s * aip + c * aiq);

        let vip = v.entry(i, p);
        let viq = e_minus * v.entry(i, q);
        v.set(i, p, c * vip - s * viq);
        v.set(i, q, s * vip + c * viq);
    }
    for j in 0..d {
        let apj = a.entry(p, j);
        let aqj = e_plus * a.entry(q, j);
        a.set(p, j, c * apj - s * aqj);
        a.set(q, j, s * apj + c * aqj);
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Eigenvalues are returned ascending; on degeneracies the order of the
/// corresponding eigenvectors is the (stable) order the solver produced,
/// so the tie-break is deterministic across runs. Each eigenvector's phase
/// is normalized so its largest-modulus component is real and positive.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<EigenDecomposition> {
    let d = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(d);

    // The Frobenius norm is unitarily invariant, so this threshold keeps its
    // meaning throughout the iteration.
    let thresh = 1e-14 * a.frobenius_norm().max(1.0);
    let max_sweeps = 100 * d * d;

    let mut converged = max_off_diagonal(&a) <= thresh;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        converged = max_off_diagonal(&a) <= thresh;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: max_sweeps });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a.entry(i, i).re.total_cmp(&a.entry(j, j).re));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.entry(i, i).re).collect();
    let mut vectors = ComplexMatrix::zero(d);
    for (col, &src) in order.iter().enumerate() {
        // canonical phase: make the largest-modulus component real positive
        let mut pivot = 0;
        for i in 1..d {
            if v.entry(i, src).norm() > v.entry(pivot, src).norm() {
                pivot = i;
            }
        }
        let pv = v.entry(pivot, src);
        let phase = if pv.norm() > 0.0 {
            (pv / pv.norm()).conj()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            vectors.set(i, col, v.entry(i, src) * phase);
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

/// Smallest eigenvalue and a unit eigenvector.
///
/// When the smallest eigenvalue is degenerate the first eigenvector in the
/// solver's ascending order is returned.
pub fn min_eig(h: &HermitianOperator) -> Result<(f64, Vec<Complex64>)> {
    let eig = eig_hermitian(h)?;
    Ok((eig.eigenvalues[0], eig.eigenvector(0)))
}

/// True iff `λ_min(H) ≥ -tol`.
pub fn is_psd(h: &HermitianOperator, tol: f64) -> Result<bool> {
    Ok(min_eig(h)?.0 >= -tol)
}

/// `Re Tr(A·B)` for Hermitian `A`, `B` (the product trace is real up to
/// round-off; the imaginary part is checked in debug builds).
pub fn trace_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let d = a.dim();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            total += a.entry(i, j) * b.entry(j, i);
        }
    }
    debug_assert!(
        total.im.abs() <= 1e-9 * (a.max_norm() * b.max_norm() * d as f64).max(1.0),
        "trace of a product of Hermitian matrices must be real, got imaginary part {:.3e}",
        total.im
    );
    Ok(total.re)
}
