//! Density-matrix orbits under the adjoint action and the block criterion for
//! state controllability on `Gr_k(C^n)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{lie_closure_tol, GeneratorSystem};
use crate::linalg::{check_square, frobenius_norm, hermitian_eig, hermitian_residual, CMatrix};
use crate::reach::Schedule;

/// Absolute clustering tolerance for density-matrix eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-8;
const DENSITY_TOL: f64 = 1e-9;
/// Singular values of the block span below this count as zero.
pub const BLOCK_RANK_TOL: f64 = 1e-9;

/// A rank-`k` orthogonal projector on `C^n`.
#[derive(Debug, Clone)]
pub struct GrassmannPoint {
    k: usize,
    projector: CMatrix,
}

impl GrassmannPoint {
    pub fn new(projector: CMatrix) -> Result<Self> {
        let n = check_square(&projector)?;
        let herm = hermitian_residual(&projector);
        let idem = frobenius_norm(&(&projector * &projector - &projector));
        let trace = projector.trace();
        let k = trace.re.round();
        if herm > DENSITY_TOL
            || idem > DENSITY_TOL
            || (trace.re - k).abs() > DENSITY_TOL
            || trace.im.abs() > DENSITY_TOL
        {
            return Err(Error::InvalidArgument(format!(
                "not a projector (hermitian {herm:.2e}, idempotent {idem:.2e}, trace {trace})"
            )));
        }
        let k = k as usize;
        if k > n {
            return Err(Error::InvalidArgument(format!("projector rank {k} exceeds {n}")));
        }
        Ok(Self { k, projector })
    }

    /// Projector onto the first `k` coordinates.
    pub fn coordinate(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
        }
        let mut p = crate::linalg::zeros(n);
        for j in 0..k {
            p[(j, j)] = crate::linalg::c(1.0, 0.0);
        }
        Self::new(p)
    }

    pub fn n(&self) -> usize {
        self.projector.nrows()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    /// The density matrix `P / k` of the flat-spectrum orbit.
    pub fn density(&self) -> Option<CMatrix> {
        (self.k > 0).then(|| self.projector.unscale(self.k as f64))
    }
}

/// Nonzero eigenvalues with multiplicities, strictly decreasing, plus the ambient dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpectrum {
    pub dim: usize,
    pub pairs: Vec<(f64, usize)>,
}

impl DensitySpectrum {
    /// Equal dimension and pairwise equal multiplicities and eigenvalues within `tol`.
    pub fn matches(&self, other: &DensitySpectrum, tol: f64) -> bool {
        self.dim == other.dim
            && self.pairs.len() == other.pairs.len()
            && self.pairs.iter().zip(&other.pairs).all(|((a, m), (b, n))| m == n && (a - b).abs() <= tol)
    }
}

pub fn density_spectrum(rho: &CMatrix) -> Result<DensitySpectrum> {
    let n = check_square(rho)?;
    let herm = hermitian_residual(rho);
    if herm > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("not Hermitian (residual {herm:.3e})")));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("trace is {trace}, expected 1")));
    }
    let eig = hermitian_eig(&(rho + rho.adjoint()).scale(0.5))?;
    if let Some(&low) = eig.eigenvalues.first() {
        if low < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {low:.3e}")));
        }
    }
    let mut pairs: Vec<(f64, usize)> = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    let flush = |cluster: &mut Vec<f64>, pairs: &mut Vec<(f64, usize)>| {
        if !cluster.is_empty() {
            let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
            if mean > CLUSTER_TOL {
                pairs.push((mean, cluster.len()));
            }
            cluster.clear();
        }
    };
    for &l in eig.eigenvalues.iter().rev() {
        if let Some(&head) = cluster.first() {
            if head - l > CLUSTER_TOL {
                flush(&mut cluster, &mut pairs);
            }
        }
        cluster.push(l);
    }
    flush(&mut cluster, &mut pairs);
    Ok(DensitySpectrum { dim: n, pairs })
}

pub fn same_orbit(rho1: &CMatrix, rho2: &CMatrix) -> Result<bool> {
    let a = density_spectrum(rho1)?;
    let b = density_spectrum(rho2)?;
    Ok(a.matches(&b, CLUSTER_TOL))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrassmannVerdict {
    pub controllable: bool,
    /// Real dimension of the span of the upper-right blocks.
    pub block_span_dim: usize,
    /// `2k(n−k)`.
    pub required_dim: usize,
    /// `required_dim`-th largest singular value of the block matrix; `None` when the
    /// Hom space is zero-dimensional.
    pub margin: Option<f64>,
    pub closure_dim: usize,
}

/// Whether the closure's upper-right `k x (n−k)` blocks span `Hom(C^k, C^{n−k})` over the reals.
pub fn grassmann_controllable(sys: &GeneratorSystem, k: usize) -> Result<GrassmannVerdict> {
    grassmann_controllable_tol(sys, k, BLOCK_RANK_TOL)
}

/// [`grassmann_controllable`] with one threshold for both the closure and the block rank.
pub fn grassmann_controllable_tol(sys: &GeneratorSystem, k: usize, tol: f64) -> Result<GrassmannVerdict> {
    let n = sys.n();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} out of range 0..={n}")));
    }
    let closure = lie_closure_tol(sys, tol)?;
    let required = 2 * k * (n - k);
    if required == 0 {
        return Ok(GrassmannVerdict {
            controllable: true,
            block_span_dim: 0,
            required_dim: 0,
            margin: None,
            closure_dim: closure.dim(),
        });
    }
    let rows = closure.dim();
    let mut m = DMatrix::<f64>::zeros(rows.max(required), required);
    for (r, b) in closure.basis().iter().enumerate() {
        let mut col = 0;
        for i in 0..k {
            for j in k..n {
                m[(r, col)] = b[(i, j)].re;
                m[(r, col + 1)] = b[(i, j)].im;
                col += 2;
            }
        }
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rank = sv.iter().filter(|&&s| s > tol).count();
    let margin = sv.get(required - 1).copied().unwrap_or(0.0);
    let margin = if rank >= required { margin } else { 0.0 };
    Ok(GrassmannVerdict {
        controllable: rank >= required,
        block_span_dim: rank,
        required_dim: required,
        margin: Some(margin),
        closure_dim: closure.dim(),
    })
}

/// `g ρ₀ g†` with `g = evaluate(s)`.
pub fn adjoint_flow(rho0: &CMatrix, s: &Schedule<'_>) -> Result<CMatrix> {
    density_spectrum(rho0)?;
    let n = check_square(rho0)?;
    if n != s.system().n() {
        return Err(Error::DimMismatch { expected: s.system().n(), got: n });
    }
    let g = s.evaluate()?;
    Ok(&g * rho0 * g.adjoint())
}
