#![allow(dead_code)]

use lie_control::linalg::{c, expm, identity, CMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

pub fn random_complex(n: usize, rng: &mut StdRng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random element of u(n) with Frobenius norm `scale`.
pub fn random_skew(n: usize, scale: f64, rng: &mut StdRng) -> CMatrix {
    let m = random_complex(n, rng);
    let x = (&m - m.adjoint()) * c(0.5, 0.0);
    let nrm = x.norm();
    if nrm == 0.0 {
        return x;
    }
    x * c(scale / nrm, 0.0)
}

/// Random element of su(n) with Frobenius norm `scale`.
pub fn random_su(n: usize, scale: f64, rng: &mut StdRng) -> CMatrix {
    let mut x = random_skew(n, 1.0, rng);
    let tr = x.trace() / c(n as f64, 0.0);
    for i in 0..n {
        x[(i, i)] -= tr;
    }
    let nrm = x.norm();
    x * c(scale / nrm, 0.0)
}

pub fn random_unitary(n: usize, rng: &mut StdRng) -> CMatrix {
    expm(&random_skew(n, 3.0, rng)).unwrap()
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = (a.nrows(), b.nrows());
    let mut m = CMatrix::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(a);
    m.view_mut((p, p), (q, q)).copy_from(b);
    m
}

pub fn fro(m: &CMatrix) -> f64 {
    m.norm()
}

/// `exp(X)` for skew-Hermitian `X` through the eigendecomposition of the Hermitian `iX`.
pub fn expm_oracle(x: &CMatrix) -> CMatrix {
    let h = x * c(0.0, 1.0);
    let h = (&h + h.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|mu| Complex64::from_polar(1.0, -mu)));
    v * d * v.adjoint()
}

fn real_coords(m: &CMatrix) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Rank of the real span by the eigenvalues of the scatter matrix `Σ v vᵀ` of unit vectors.
pub fn scatter_rank(mats: &[CMatrix], rel_tol: f64) -> usize {
    let Some(first) = mats.first() else { return 0 };
    let len = 2 * first.nrows() * first.ncols();
    let mut s = DMatrix::<f64>::zeros(len, len);
    for m in mats {
        let v = real_coords(m);
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm < 1e-14 {
            continue;
        }
        let v = nalgebra::DVector::from_iterator(len, v.into_iter().map(|x| x / nrm));
        s += &v * v.transpose();
    }
    let ev = s.symmetric_eigen().eigenvalues;
    let top = ev.iter().cloned().fold(0.0, f64::max);
    ev.iter().filter(|&&e| e > rel_tol * top.max(1.0)).count()
}

/// Dimension of the generated Lie algebra by brute force: all left-normed brackets
/// `[g₁, [g₂, … [g_{k−1}, g_k]]]` up to `depth`, ranked by [`scatter_rank`].
pub fn bracket_oracle_dim(gens: &[CMatrix], depth: usize, max_words: usize) -> usize {
    let mut all: Vec<CMatrix> = gens.to_vec();
    let mut level: Vec<CMatrix> = gens.to_vec();
    for _ in 1..depth {
        if all.len() + level.len() * gens.len() > max_words {
            break;
        }
        let next: Vec<CMatrix> = gens
            .iter()
            .flat_map(|g| level.iter().map(move |w| g * w - w * g))
            .map(|b| {
                let nrm = b.norm();
                if nrm > 1e-12 {
                    b * c(1.0 / nrm, 0.0)
                } else {
                    b * c(0.0, 0.0)
                }
            })
            .collect();
        all.extend(next.iter().cloned());
        level = next;
    }
    scatter_rank(&all, 1e-10)
}

pub fn is_identity(m: &CMatrix, tol: f64) -> bool {
    fro(&(m - identity(m.nrows()))) <= tol
}
