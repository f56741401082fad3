//! Root structure of `su(n)`: regular and strongly regular elements, the real
//! Weyl-type basis, the coupling graph of a generator pair, and the pair
//! generation criteria.
//!
//! Conventions. For a skew-Hermitian traceless `A` the eigenvalues `λ_j` are
//! purely imaginary. They are ordered by the ascending eigenvalues of the
//! Hermitian matrix `iA`, which puts `i·diag(d)` with `d` descending in its
//! natural order. Roots are `α_pq = λ_p − λ_q`, and `α̃_pq` denotes the real
//! number with `α_pq = i·α̃_pq`. With
//!
//! * `h_k  = i (E_kk − E_{k+1,k+1})`
//! * `U_pq = E_pq − E_qp`
//! * `V_pq = i (E_pq + E_qp)`
//!
//! a diagonal `A` satisfies `[A, U_pq] = α̃_pq V_pq`, `[A, V_pq] = −α̃_pq U_pq`
//! and `[U_{p,p+1}, V_{p,p+1}] = 2 h_p`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{closure_of, CLOSURE_TOL};
use crate::linalg::{
    c, check_same_dim, check_square, commutator, frobenius_norm, hermitian_eig, i_diag, skew_residual, to_real_vec,
    unit, zeros, CMatrix, RealSpan, I,
};

const SKEW_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;

/// Eigenvalues, roots and diagonalizer of an element of `su(n)`.
#[derive(Debug, Clone)]
pub struct RootData {
    /// Purely imaginary eigenvalues `λ_j`.
    pub eigenvalues: Vec<Complex64>,
    /// Columns are eigenvectors; `diagonalizer† A diagonalizer` is diagonal.
    pub diagonalizer: CMatrix,
}

impl RootData {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `α_pq = λ_p − λ_q` (0-based indices).
    pub fn root(&self, p: usize, q: usize) -> Complex64 {
        self.eigenvalues[p] - self.eigenvalues[q]
    }

    /// All `n(n−1)` roots keyed by ordered pair `(p, q)`, `p ≠ q`.
    pub fn roots(&self) -> Vec<((usize, usize), Complex64)> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1));
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    out.push(((p, q), self.root(p, q)));
                }
            }
        }
        out
    }

    /// Smallest gap `|λ_p − λ_q|` over `p < q`; infinite for `n < 2`.
    pub fn min_gap(&self) -> f64 {
        let mut im: Vec<f64> = self.eigenvalues.iter().map(|l| l.im).collect();
        im.sort_by(f64::total_cmp);
        im.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance between two distinct roots; infinite when there are fewer than two.
    pub fn min_root_separation(&self) -> f64 {
        let mut vals: Vec<f64> = self.roots().iter().map(|(_, a)| a.im).collect();
        vals.sort_by(f64::total_cmp);
        vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Relative default tolerance `1e-8 · max|λ|`.
    pub fn default_tol(&self) -> f64 {
        1e-8 * self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }
}

fn check_su(a: &CMatrix, what: &str) -> Result<usize> {
    let n = check_square(a)?;
    let scale = frobenius_norm(a).max(1.0);
    let residual = skew_residual(a);
    if residual > SKEW_TOL * scale {
        return Err(Error::NotSkewHermitian { name: what.into(), residual });
    }
    let trace = a.trace().norm();
    if trace > TRACE_TOL * scale {
        return Err(Error::NotTraceless { name: what.into(), trace });
    }
    Ok(n)
}

pub fn root_data(a: &CMatrix) -> Result<RootData> {
    check_su(a, "A")?;
    let eig = hermitian_eig(&(a * I))?;
    // A = -i (iA), so an eigenvalue μ of iA gives λ = -iμ.
    let eigenvalues = eig.eigenvalues.iter().map(|&mu| c(0.0, -mu)).collect();
    Ok(RootData { eigenvalues, diagonalizer: eig.eigenvectors })
}

pub fn is_regular(a: &CMatrix, tol: f64) -> Result<bool> {
    Ok(root_data(a)?.min_gap() > tol)
}

pub fn is_strongly_regular(a: &CMatrix, tol: f64) -> Result<bool> {
    Ok(root_data(a)?.min_root_separation() > tol)
}

/// [`is_regular`] at the default relative tolerance.
pub fn is_regular_default(a: &CMatrix) -> Result<bool> {
    let rd = root_data(a)?;
    Ok(rd.min_gap() > rd.default_tol())
}

pub fn is_strongly_regular_default(a: &CMatrix) -> Result<bool> {
    let rd = root_data(a)?;
    Ok(rd.min_root_separation() > rd.default_tol())
}

/// Undirected graph on the eigenstates of `A` (0-based nodes).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGraph {
    pub nodes: usize,
    /// Pairs `(p, q)` with `p < q`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl CouplingGraph {
    /// Connected components, each sorted, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(p, q) in &self.edges {
            adj[p].push(q);
            adj[q].push(p);
        }
        let mut seen = vec![false; self.nodes];
        let mut out = Vec::new();
        for start in 0..self.nodes {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.nodes).filter(|&v| !self.edges.iter().any(|&(p, q)| p == v || q == v)).collect()
    }

    /// Adjacency matrix as 0/1 rows.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.nodes]; self.nodes];
        for &(p, q) in &self.edges {
            m[p][q] = 1;
            m[q][p] = 1;
        }
        m
    }
}

/// Default edge threshold `1e-10 · ‖B‖_F`.
pub fn default_edge_tol(b: &CMatrix) -> f64 {
    1e-10 * frobenius_norm(b)
}

/// Coupling graph of `B` in the eigenbasis of a regular `A`.
pub fn coupling_graph(a: &CMatrix, b: &CMatrix, edge_tol: f64) -> Result<CouplingGraph> {
    let n = check_same_dim(a, b)?;
    let rd = root_data(a)?;
    let gap = rd.min_gap();
    if n > 1 && (gap.is_nan() || gap <= rd.default_tol()) {
        return Err(Error::NotRegular { gap });
    }
    Ok(graph_in_basis(&rd, b, edge_tol))
}

fn graph_in_basis(rd: &RootData, b: &CMatrix, edge_tol: f64) -> CouplingGraph {
    let n = rd.n();
    let v = &rd.diagonalizer;
    let bp = v.adjoint() * b * v;
    let mut edges = BTreeSet::new();
    for p in 0..n {
        for q in p + 1..n {
            if bp[(p, q)].norm().max(bp[(q, p)].norm()) > edge_tol {
                edges.insert((p, q));
            }
        }
    }
    CouplingGraph { nodes: n, edges }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum PairVerdict {
    /// The coupling graph is disconnected; the pair cannot generate `su(n)`.
    FailsNecessary { components: Vec<Vec<usize>> },
    /// Connected graph and strongly regular `A`: the pair generates `su(n)`.
    SufficientGenerates,
    /// Regular but not strongly regular `A` with a connected graph; decided by closure.
    InconclusiveThenClosure { dim: usize },
}

/// Full analysis of a pair, including the data behind the verdict.
#[derive(Debug, Clone)]
pub struct PairAnalysis {
    pub verdict: PairVerdict,
    pub graph: CouplingGraph,
    pub roots: RootData,
    pub strongly_regular: bool,
}

pub fn analyze_pair(a: &CMatrix, b: &CMatrix) -> Result<PairAnalysis> {
    let n = check_same_dim(a, b)?;
    check_su(b, "B")?;
    let rd = root_data(a)?;
    let tol = rd.default_tol();
    let gap = rd.min_gap();
    if n > 1 && (gap.is_nan() || gap <= tol) {
        return Err(Error::NotRegular { gap });
    }
    let graph = graph_in_basis(&rd, b, default_edge_tol(b));
    let strongly_regular = rd.min_root_separation() > tol;
    let verdict = if !graph.is_connected() {
        PairVerdict::FailsNecessary { components: graph.components() }
    } else if strongly_regular {
        PairVerdict::SufficientGenerates
    } else {
        PairVerdict::InconclusiveThenClosure { dim: closure_of(n, &[a.clone(), b.clone()])?.dim() }
    };
    Ok(PairAnalysis { verdict, graph, roots: rd, strongly_regular })
}

pub fn pair_verdict(a: &CMatrix, b: &CMatrix) -> Result<PairVerdict> {
    Ok(analyze_pair(a, b)?.verdict)
}

/// `h_k = i (E_kk − E_{k+1,k+1})`, 0-based `k < n − 1`.
pub fn weyl_h(n: usize, k: usize) -> CMatrix {
    (unit(n, k, k) - unit(n, k + 1, k + 1)) * I
}

/// `U_pq = E_pq − E_qp`.
pub fn weyl_u(n: usize, p: usize, q: usize) -> CMatrix {
    unit(n, p, q) - unit(n, q, p)
}

/// `V_pq = i (E_pq + E_qp)`.
pub fn weyl_v(n: usize, p: usize, q: usize) -> CMatrix {
    (unit(n, p, q) + unit(n, q, p)) * I
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("su(n) needs n >= 2, got {n}")));
    }
    Ok(())
}

/// The `n² − 1` element real basis of `su(n)`: all `h_k`, then `U_pq`, `V_pq` for `p < q`.
///
/// Off-diagonal elements are mutually orthogonal and orthogonal to the `h_k`;
/// the `h_k` themselves have the Cartan-type Gram matrix (2 on the diagonal,
/// −1 between neighbours).
pub fn weyl_real_basis(n: usize) -> Result<Vec<CMatrix>> {
    check_n(n)?;
    let mut out: Vec<CMatrix> = (0..n - 1).map(|k| weyl_h(n, k)).collect();
    for p in 0..n {
        for q in p + 1..n {
            out.push(weyl_u(n, p, q));
            out.push(weyl_v(n, p, q));
        }
    }
    Ok(out)
}

/// Diagonal weights `2^j − mean`, `j = 0..n`; all pairwise differences are distinct.
pub fn canonical_weights(n: usize) -> Vec<f64> {
    let c: Vec<f64> = (0..n).map(|j| 2f64.powi(j as i32)).collect();
    let mean = c.iter().sum::<f64>() / n as f64;
    c.iter().map(|x| x - mean).collect()
}

/// A strongly regular diagonal `A` and a path-coupled `B = Σ U_{p,p+1}`.
pub fn canonical_generator_pair(n: usize) -> Result<(CMatrix, CMatrix)> {
    check_n(n)?;
    let a = i_diag(&canonical_weights(n));
    let mut b = zeros(n);
    for p in 0..n - 1 {
        b += weyl_u(n, p, p + 1);
    }
    Ok((a, b))
}

/// Dimension of the real Krylov space of `ad_h` started at `e = Σ_{p<q} (U_pq + V_pq)`,
/// with `h` taken in its own eigenbasis.
///
/// For strongly regular `h` every off-diagonal root pair sits at a distinct
/// frequency of `ad_h`, so the Krylov space is the whole off-diagonal part of
/// `su(n)`, dimension `n(n−1)`. The space is built Arnoldi-style, which spans the
/// same subspace as the powers `ad_h^k(e)` without their growth in magnitude.
pub fn root_vector_krylov_rank(h: &CMatrix) -> Result<usize> {
    let rd = root_data(h)?;
    let n = rd.n();
    check_n(n)?;
    let d: Vec<f64> = rd.eigenvalues.iter().map(|l| l.im).collect();
    let hd = i_diag(&d);
    let scale = d.iter().map(|x| x.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let hd = hd.unscale(scale);

    let mut e = zeros(n);
    for p in 0..n {
        for q in p + 1..n {
            e += weyl_u(n, p, q) + weyl_v(n, p, q);
        }
    }
    let mut span = RealSpan::new(2 * n * n);
    let mut last = match span.insert(to_real_vec(&e), 0.0) {
        Some(_) => crate::linalg::from_real_vec(&span.vectors()[0], n),
        None => return Ok(0),
    };
    for _ in 0..n * n {
        let next = commutator(&hd, &last);
        if span.insert(to_real_vec(&next), CLOSURE_TOL).is_none() {
            break;
        }
        last = crate::linalg::from_real_vec(span.vectors().last().unwrap(), n);
    }
    Ok(span.dim())
}
