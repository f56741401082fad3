//! Dense complex linear algebra shared by every analysis in the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. All tolerances are expressed in
//! the Frobenius norm. Spans are computed over the reals: a complex `n x n`
//! matrix is flattened to a real vector of length `2 n^2` and the real inner
//! product `Re tr(X^† Y)` becomes the Euclidean dot product of those vectors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance used when no caller-provided tolerance applies.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Matrix unit with a single 1 at `(p, q)`.
pub fn unit(n: usize, p: usize, q: usize) -> CMatrix {
    let mut m = zeros(n);
    m[(p, q)] = Complex64::new(1.0, 0.0);
    m
}

/// Diagonal matrix `i * diag(d)`.
pub fn i_diag(d: &[f64]) -> CMatrix {
    let mut m = zeros(d.len());
    for (k, &v) in d.iter().enumerate() {
        m[(k, k)] = c(0.0, v);
    }
    m
}

pub fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

pub fn check_same_dim(a: &CMatrix, b: &CMatrix) -> Result<usize> {
    let n = check_square(a)?;
    let m = check_square(b)?;
    if n != m {
        return Err(Error::DimMismatch { expected: n, got: m });
    }
    Ok(n)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `‖X + X†‖_F`.
pub fn skew_residual(x: &CMatrix) -> f64 {
    frobenius_norm(&(x + x.adjoint()))
}

/// `‖A − A†‖_F`.
pub fn hermitian_residual(a: &CMatrix) -> f64 {
    frobenius_norm(&(a - a.adjoint()))
}

pub fn is_skew_hermitian(x: &CMatrix, tol: f64) -> bool {
    skew_residual(x) <= tol * frobenius_norm(x).max(1.0)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    let n = u.nrows();
    frobenius_norm(&(u.adjoint() * u - identity(n))) <= tol
}

/// The real inner product `Re tr(X† Y)`.
pub fn frobenius_real_inner(x: &CMatrix, y: &CMatrix) -> Result<f64> {
    check_same_dim(x, y)?;
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a.re * b.re + a.im * b.im).sum())
}

/// Flattens a complex matrix into interleaved (re, im) pairs, column-major.
pub fn to_real_vec(m: &CMatrix) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * m.len());
    for z in m.iter() {
        v.push(z.re);
        v.push(z.im);
    }
    v
}

pub fn from_real_vec(v: &[f64], n: usize) -> CMatrix {
    debug_assert_eq!(v.len(), 2 * n * n);
    CMatrix::from_iterator(n, n, v.chunks_exact(2).map(|p| c(p[0], p[1])))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Incrementally grown orthonormal basis of a real subspace.
///
/// Orthogonalization is modified Gram–Schmidt with one full re-orthogonalization
/// pass, which keeps the basis orthonormal to round-off at the dimensions used
/// here (up to a few hundred vectors).
#[derive(Debug, Clone, Default)]
pub struct RealSpan {
    len: usize,
    basis: Vec<Vec<f64>>,
}

impl RealSpan {
    pub fn new(len: usize) -> Self {
        Self { len, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Removes the component of `v` lying in the span, in place.
    pub fn reject(&self, v: &mut [f64]) {
        debug_assert_eq!(v.len(), self.len);
        for _ in 0..2 {
            for b in &self.basis {
                let coef = dot(b, v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= coef * y;
                }
            }
        }
    }

    /// Distance from `v` to the span.
    pub fn distance(&self, v: &[f64]) -> f64 {
        let mut r = v.to_vec();
        self.reject(&mut r);
        norm(&r)
    }

    /// Coefficients of the orthogonal projection of `v` onto the basis.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, v)).collect()
    }

    /// Adds the normalized residual of `v` when its norm exceeds `threshold`.
    /// Returns the residual norm when a vector was added.
    pub fn insert(&mut self, mut v: Vec<f64>, threshold: f64) -> Option<f64> {
        self.reject(&mut v);
        let r = norm(&v);
        if r > threshold && r > 0.0 {
            v.iter_mut().for_each(|x| *x /= r);
            self.basis.push(v);
            Some(r)
        } else {
            None
        }
    }
}

/// Result of [`real_span_rank`].
#[derive(Debug, Clone)]
pub struct SpanRank {
    pub rank: usize,
    pub orthobasis: Vec<CMatrix>,
}

/// Dimension of the real linear span of `mats`, with an orthonormal basis of it.
///
/// A matrix counts as independent when its residual against the span built so
/// far exceeds `tol` times the largest input norm.
pub fn real_span_rank(mats: &[CMatrix], tol: f64) -> Result<SpanRank> {
    let first = mats.first().ok_or(Error::Empty("real_span_rank needs at least one matrix"))?;
    let n = check_square(first)?;
    for m in mats {
        check_same_dim(first, m)?;
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let scale = mats.iter().map(frobenius_norm).fold(0.0, f64::max);
    let mut span = RealSpan::new(2 * n * n);
    if scale > 0.0 {
        for m in mats {
            span.insert(to_real_vec(m), tol * scale);
        }
    }
    Ok(SpanRank { rank: span.dim(), orthobasis: span.vectors().iter().map(|v| from_real_vec(v, n)).collect() })
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `j` belongs to `eigenvalues[j]`.
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut d = zeros(n);
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            d[(k, k)] = c(l, 0.0);
        }
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// Eigenvalues come back ascending. Each eigenvector is rescaled so that its
/// largest-magnitude component (first one on ties) is real and positive.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    let n = check_square(a)?;
    let residual = hermitian_residual(a);
    if residual > 1e-10 * frobenius_norm(a) {
        return Err(Error::NotHermitian { residual });
    }
    if n == 0 {
        return Ok(HermitianEig { eigenvalues: vec![], eigenvectors: zeros(0) });
    }
    // Exact symmetrization removes the admissible round-off before the solver sees it.
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut vectors = zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut best = 0;
        for k in 1..n {
            if col[k].norm() > col[best].norm() * (1.0 + 1e-12) {
                best = k;
            }
        }
        let pivot = col[best];
        let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { c(1.0, 0.0) };
        for k in 0..n {
            vectors[(k, dst)] = col[k] * phase;
        }
    }
    Ok(HermitianEig { eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(), eigenvectors: vectors })
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn norm1(m: &CMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(x: &CMatrix) -> Result<CMatrix> {
    let n = check_square(x)?;
    let id = identity(n);
    let nrm = norm1(x);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = x.scale(0.5f64.powi(s));

    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]))
        + a6.scale(b[7])
        + a4.scale(b[5])
        + a2.scale(b[3])
        + id.scale(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]))
        + a6.scale(b[6])
        + a4.scale(b[4])
        + a2.scale(b[2])
        + id.scale(b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or_else(|| Error::InvalidArgument("Padé denominator is singular".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Pauli matrices and related fixed elements.
pub mod pauli {
    use super::{c, CMatrix};

    pub fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn sigma_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    /// `i σ` for a Pauli matrix `σ`.
    pub fn i_times(m: &CMatrix) -> CMatrix {
        m * c(0.0, 1.0)
    }
}
