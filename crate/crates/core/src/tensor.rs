//! Kronecker-sum embeddings and the one-element extension from
//! `u(m)⊗1 + 1⊗u(n)` to `u(mn)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{closure_of_tol, AlgebraBasis, CLOSURE_TOL};
use crate::linalg::{check_square, identity, is_skew_hermitian, kron, unit, CMatrix, I};
use crate::su::weyl_real_basis;

/// Largest `mn` for which an extension is verified by a closure run.
pub const VERIFY_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorFactorization {
    dims: Vec<usize>,
}

impl TensorFactorization {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Empty("a factorization needs at least one factor"));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidArgument(format!("factor dimensions must be >= 2, got {d}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }
}

/// `u1 ⊗ 1 + 1 ⊗ u2`.
pub fn kron_sum_embed(u1: &CMatrix, u2: &CMatrix) -> Result<CMatrix> {
    let m = check_square(u1)?;
    let n = check_square(u2)?;
    for (name, u) in [("u1", u1), ("u2", u2)] {
        if !is_skew_hermitian(u, 1e-10) {
            return Err(Error::NotSkewHermitian { name: name.into(), residual: crate::linalg::skew_residual(u) });
        }
    }
    Ok(kron(u1, &identity(n)) + kron(&identity(m), u2))
}

/// Standard real basis of `u(n)`: `i E_kk`, `U_pq`, `V_pq`.
pub fn unitary_algebra_basis(n: usize) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = (0..n).map(|k| unit(n, k, k) * I).collect();
    for p in 0..n {
        for q in p + 1..n {
            out.push(crate::su::weyl_u(n, p, q));
            out.push(crate::su::weyl_v(n, p, q));
        }
    }
    out
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!("factor dimensions must be >= 2, got ({m}, {n})")));
    }
    Ok(())
}

/// Basis of `L = u(m)⊗1 + 1⊗u(n)` inside `u(mn)`; dimension `m² + n² − 1`.
pub fn product_subalgebra(m: usize, n: usize) -> Result<AlgebraBasis> {
    check_dims(m, n)?;
    let mut mats: Vec<CMatrix> = unitary_algebra_basis(m).iter().map(|a| kron(a, &identity(n))).collect();
    mats.extend(unitary_algebra_basis(n).iter().map(|b| kron(&identity(m), b)));
    AlgebraBasis::from_matrices(m * n, &mats)
}

/// Real span `su(m) ⊗ i·su(n)`, the complement of `L` in `u(mn)`.
pub fn product_complement(m: usize, n: usize) -> Result<Vec<CMatrix>> {
    check_dims(m, n)?;
    let a = weyl_real_basis(m)?;
    let b = weyl_real_basis(n)?;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            out.push(kron(x, &(y * I)));
        }
    }
    Ok(out)
}

/// Default extension element `i·(E₁ ⊗ E₁)` with `E₁ = diag(1, −1, 0, …)`, i.e. the
/// product of the first diagonal Weyl elements of each factor, made skew-Hermitian.
pub fn default_candidate(m: usize, n: usize) -> Result<CMatrix> {
    check_dims(m, n)?;
    let e1 = |d: usize| unit(d, 0, 0) - unit(d, 1, 1);
    Ok(kron(&e1(m), &e1(n)) * I)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "dim")]
pub enum Verification {
    Verified(usize),
    Failed(usize),
    /// `mn` above [`VERIFY_LIMIT`]; the closure run was skipped.
    UnverifiedSize,
}

impl Verification {
    pub fn is_verified(self) -> bool {
        matches!(self, Verification::Verified(_))
    }
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub element: CMatrix,
    /// Distance of the element from `L`.
    pub distance_from_subalgebra: f64,
    pub verification: Verification,
}

/// Adds one element outside `L` and checks that the closure is all of `u(mn)`.
pub fn minimal_extension(m: usize, n: usize, candidate: Option<&CMatrix>) -> Result<Extension> {
    minimal_extension_tol(m, n, candidate, CLOSURE_TOL)
}

/// [`minimal_extension`] with an explicit membership and closure threshold.
pub fn minimal_extension_tol(m: usize, n: usize, candidate: Option<&CMatrix>, tol: f64) -> Result<Extension> {
    check_dims(m, n)?;
    let total = m * n;
    let x = match candidate {
        Some(c) => {
            let d = check_square(c)?;
            if d != total {
                return Err(Error::DimMismatch { expected: total, got: d });
            }
            if !is_skew_hermitian(c, 1e-10) {
                return Err(Error::NotSkewHermitian {
                    name: "candidate".into(),
                    residual: crate::linalg::skew_residual(c),
                });
            }
            c.clone()
        }
        None => default_candidate(m, n)?,
    };
    let l = product_subalgebra(m, n)?;
    let distance = l.distance(&x)?;
    if l.contains(&x, tol)? {
        return Err(Error::InsideSubalgebra { distance });
    }
    let verification = if total > VERIFY_LIMIT {
        Verification::UnverifiedSize
    } else {
        let mut mats = l.basis().to_vec();
        mats.push(x.clone());
        let dim = closure_of_tol(total, &mats, tol)?.dim();
        if dim == dim_check_tensor(m, n) {
            Verification::Verified(dim)
        } else {
            Verification::Failed(dim)
        }
    };
    Ok(Extension { element: x, distance_from_subalgebra: distance, verification })
}

/// `dim u(mn) = (mn)²`.
pub fn dim_check_tensor(m: usize, n: usize) -> usize {
    (m * n).pow(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JoinShape {
    Balanced,
    LeftDeep,
}

/// Pairing order for building `U(V₁⊗…⊗V_r)` from the factor groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JoinTree {
    /// Factor index (0-based) and its dimension.
    Leaf {
        factor: usize,
        dim: usize,
    },
    Join {
        dim: usize,
        left: Box<JoinTree>,
        right: Box<JoinTree>,
    },
}

impl JoinTree {
    pub fn dim(&self) -> usize {
        match self {
            JoinTree::Leaf { dim, .. } | JoinTree::Join { dim, .. } => *dim,
        }
    }

    pub fn joins(&self) -> usize {
        match self {
            JoinTree::Leaf { .. } => 0,
            JoinTree::Join { left, right, .. } => 1 + left.joins() + right.joins(),
        }
    }

    fn join(left: JoinTree, right: JoinTree) -> JoinTree {
        JoinTree::Join { dim: left.dim() * right.dim(), left: Box::new(left), right: Box::new(right) }
    }

    /// `(m, n)` of every binary join in post-order, i.e. the order extensions are added.
    pub fn join_dims(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.collect_joins(&mut out);
        out
    }

    fn collect_joins(&self, out: &mut Vec<(usize, usize)>) {
        if let JoinTree::Join { left, right, .. } = self {
            left.collect_joins(out);
            right.collect_joins(out);
            out.push((left.dim(), right.dim()));
        }
    }
}

impl fmt::Display for JoinTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JoinTree::Leaf { factor, .. } => write!(f, "V{}", factor + 1),
            JoinTree::Join { left, right, .. } => write!(f, "({left} ⊗ {right})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainPlan {
    pub extension_count: usize,
    pub join_tree: JoinTree,
}

pub fn chain_plan(f: &TensorFactorization) -> ChainPlan {
    chain_plan_with(f, JoinShape::Balanced)
}

/// Balanced pairing joins neighbours level by level, carrying an odd factor up.
pub fn chain_plan_with(f: &TensorFactorization, shape: JoinShape) -> ChainPlan {
    let mut level: Vec<JoinTree> =
        f.dims().iter().enumerate().map(|(factor, &dim)| JoinTree::Leaf { factor, dim }).collect();
    match shape {
        JoinShape::Balanced => {
            while level.len() > 1 {
                let mut next = Vec::with_capacity(level.len().div_ceil(2));
                let mut it = level.into_iter();
                while let Some(a) = it.next() {
                    match it.next() {
                        Some(b) => next.push(JoinTree::join(a, b)),
                        None => next.push(a),
                    }
                }
                level = next;
            }
        }
        JoinShape::LeftDeep => {
            let mut it = level.into_iter();
            let mut acc = it.next().expect("factorization is nonempty");
            for t in it {
                acc = JoinTree::join(acc, t);
            }
            level = vec![acc];
        }
    }
    let join_tree = level.pop().expect("factorization is nonempty");
    ChainPlan { extension_count: join_tree.joins(), join_tree }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;
    use crate::linalg::{expm, frobenius_norm, real_span_rank, zeros};

    #[test]
    fn kron_sum_examples() {
        assert_eq!(kron_sum_embed(&zeros(2), &zeros(2)).unwrap(), zeros(4));
        let z = i_times(&sigma_z());
        assert_eq!(kron_sum_embed(&z, &zeros(2)).unwrap(), kron(&z, &identity(2)));
        assert!(kron_sum_embed(&sigma_x(), &zeros(2)).is_err());
    }

    #[test]
    fn kron_sum_exponentiates_to_tensor_product() {
        let x = i_times(&sigma_x()).scale(0.7);
        let y = crate::su::weyl_v(3, 0, 2).scale(1.3) + crate::su::weyl_h(3, 1).scale(0.4);
        let lhs = expm(&kron_sum_embed(&x, &y).unwrap()).unwrap();
        let rhs = kron(&expm(&x).unwrap(), &expm(&y).unwrap());
        assert!(frobenius_norm(&(lhs - rhs)) < 1e-9);
    }

    #[test]
    fn product_subalgebra_dims() {
        assert_eq!(product_subalgebra(2, 2).unwrap().dim(), 7);
        assert_eq!(product_subalgebra(2, 3).unwrap().dim(), 12);
        assert!(product_subalgebra(1, 3).is_err());
        // i·1⊗1 is shared and appears once.
        let l = product_subalgebra(2, 2).unwrap();
        assert!(l.contains_center());
        assert!(l.closure_defect() < 1e-12);
    }

    #[test]
    fn default_candidate_is_zz() {
        let x = default_candidate(2, 2).unwrap();
        assert_eq!(x, kron(&sigma_z(), &sigma_z()) * I);
    }

    #[test]
    fn extension_examples() {
        let e = minimal_extension(2, 2, None).unwrap();
        assert_eq!(e.verification, Verification::Verified(16));
        let inside = kron(&i_times(&sigma_z()), &identity(2));
        assert!(matches!(minimal_extension(2, 2, Some(&inside)), Err(Error::InsideSubalgebra { .. })));
        let e = minimal_extension(2, 3, None).unwrap();
        assert_eq!(e.verification, Verification::Verified(36));
        let e = minimal_extension(3, 3, None).unwrap();
        assert_eq!(e.verification, Verification::UnverifiedSize);
    }

    #[test]
    fn complement_has_expected_rank_and_is_orthogonal() {
        for (m, n) in [(2, 2), (2, 3)] {
            let comp = product_complement(m, n).unwrap();
            let r = real_span_rank(&comp, 1e-9).unwrap();
            assert_eq!(r.rank, (m * m - 1) * (n * n - 1));
            let l = product_subalgebra(m, n).unwrap();
            for x in &comp {
                for b in l.basis() {
                    assert!(crate::linalg::frobenius_real_inner(x, b).unwrap().abs() < 1e-12);
                }
            }
            let mut all = l.basis().to_vec();
            all.extend(comp);
            assert_eq!(real_span_rank(&all, 1e-9).unwrap().rank, dim_check_tensor(m, n));
        }
    }

    #[test]
    fn chain_counts() {
        let plan = chain_plan(&TensorFactorization::new(vec![2, 2, 2, 2, 2]).unwrap());
        assert_eq!(plan.extension_count, 4);
        assert_eq!(plan.join_tree.to_string(), "(((V1 ⊗ V2) ⊗ (V3 ⊗ V4)) ⊗ V5)");
        assert_eq!(plan.join_tree.join_dims(), vec![(2, 2), (2, 2), (4, 4), (16, 2)]);
        assert_eq!(chain_plan(&TensorFactorization::new(vec![3]).unwrap()).extension_count, 0);
        assert_eq!(chain_plan(&TensorFactorization::new(vec![2, 3]).unwrap()).extension_count, 1);
        let f = TensorFactorization::new(vec![2, 3, 2, 4, 2, 2]).unwrap();
        assert_eq!(chain_plan_with(&f, JoinShape::LeftDeep).extension_count, 5);
        assert_eq!(chain_plan_with(&f, JoinShape::Balanced).join_tree.dim(), f.total());
        assert!(TensorFactorization::new(vec![]).is_err());
        assert!(TensorFactorization::new(vec![2, 1]).is_err());
    }

    #[test]
    fn dim_check() {
        assert_eq!(dim_check_tensor(2, 2), 16);
        assert_eq!(dim_check_tensor(2, 3), 36);
        assert_eq!(dim_check_tensor(3, 3), 81);
    }
}
