//! Lie closure of skew-Hermitian generators and the transformation-controllability
//! verdict on `U(n)` / `SU(n)`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_square, commutator, frobenius_norm, from_real_vec, skew_residual, to_real_vec, CMatrix, RealSpan,
};

/// Relative tolerance for admitting a new direction into a closure.
pub const CLOSURE_TOL: f64 = 1e-9;

const GENERATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ambient {
    #[serde(rename = "U(n)", alias = "U")]
    Unitary,
    #[serde(rename = "SU(n)", alias = "SU")]
    SpecialUnitary,
}

impl Ambient {
    /// Real dimension of the ambient Lie algebra.
    pub fn algebra_dim(self, n: usize) -> usize {
        match self {
            Ambient::Unitary => n * n,
            Ambient::SpecialUnitary => (n * n).saturating_sub(1),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Unitary => write!(f, "U(n)"),
            Ambient::SpecialUnitary => write!(f, "SU(n)"),
        }
    }
}

/// Named skew-Hermitian generators acting on `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSystem {
    n: usize,
    ambient: Ambient,
    generators: Vec<(String, CMatrix)>,
}

impl GeneratorSystem {
    pub fn new<S: Into<String>>(
        n: usize,
        ambient: Ambient,
        generators: impl IntoIterator<Item = (S, CMatrix)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut gens = Vec::new();
        for (name, m) in generators {
            let name = name.into();
            let dim = check_square(&m)?;
            if dim != n {
                return Err(Error::DimMismatch { expected: n, got: dim });
            }
            let scale = frobenius_norm(&m).max(1.0);
            let residual = skew_residual(&m);
            if residual > GENERATOR_TOL * scale {
                return Err(Error::NotSkewHermitian { name, residual });
            }
            if ambient == Ambient::SpecialUnitary {
                let trace = m.trace().norm();
                if trace > GENERATOR_TOL * scale {
                    return Err(Error::NotTraceless { name, trace });
                }
            }
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateName(name));
            }
            gens.push((name, m));
        }
        Ok(Self { n, ambient, generators: gens })
    }

    /// Generators named `g0`, `g1`, ….
    pub fn unnamed(n: usize, ambient: Ambient, generators: impl IntoIterator<Item = CMatrix>) -> Result<Self> {
        Self::new(n, ambient, generators.into_iter().enumerate().map(|(k, m)| (format!("g{k}"), m)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn generators(&self) -> &[(String, CMatrix)] {
        &self.generators
    }

    pub fn matrices(&self) -> impl Iterator<Item = &CMatrix> {
        self.generators.iter().map(|(_, m)| m)
    }

    pub fn get(&self, name: &str) -> Option<&CMatrix> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// A copy with one more generator appended.
    pub fn with_generator(&self, name: impl Into<String>, m: CMatrix) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.push((name.into(), m));
        Self::new(self.n, self.ambient, gens)
    }

    /// Conjugates every generator by a unitary `g`.
    pub fn conjugated(&self, g: &CMatrix) -> Result<Self> {
        let gi = g.adjoint();
        Self::new(self.n, self.ambient, self.generators.iter().map(|(name, m)| (name.clone(), g * m * &gi)))
    }
}

/// Orthonormal basis of a real Lie subalgebra of `u(n)`.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    n: usize,
    basis: Vec<CMatrix>,
    span: RealSpan,
    generation_depth: usize,
}

impl AlgebraBasis {
    fn from_span(n: usize, span: RealSpan, generation_depth: usize) -> Self {
        let basis = span.vectors().iter().map(|v| from_real_vec(v, n)).collect();
        Self { n, basis, span, generation_depth }
    }

    /// Wraps an already-closed set of matrices; they are orthonormalized here.
    pub fn from_matrices(n: usize, mats: &[CMatrix]) -> Result<Self> {
        let mut span = RealSpan::new(2 * n * n);
        for m in mats {
            let dim = check_square(m)?;
            if dim != n {
                return Err(Error::DimMismatch { expected: n, got: dim });
            }
            span.insert(to_real_vec(m), CLOSURE_TOL * frobenius_norm(m));
        }
        Ok(Self::from_span(n, span, 0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Number of bracket sweeps the closure needed to saturate.
    pub fn generation_depth(&self) -> usize {
        self.generation_depth
    }

    /// Frobenius distance from `x` to the span of the basis.
    pub fn distance(&self, x: &CMatrix) -> Result<f64> {
        let dim = check_square(x)?;
        if dim != self.n {
            return Err(Error::DimMismatch { expected: self.n, got: dim });
        }
        Ok(self.span.distance(&to_real_vec(x)))
    }

    /// Whether `x` lies in the span, relative to `‖x‖_F`.
    pub fn contains(&self, x: &CMatrix, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol * frobenius_norm(x))
    }

    /// Largest bracket residual `[b_i, b_j]` off the span; zero for a closed algebra.
    pub fn closure_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max(self.span.distance(&to_real_vec(&commutator(a, b))));
            }
        }
        worst
    }

    /// Whether the identity direction `i·1` belongs to the algebra.
    pub fn contains_center(&self) -> bool {
        let id = crate::linalg::identity(self.n) * crate::linalg::I;
        self.contains(&id, 1e-8).unwrap_or(false)
    }
}

/// Smallest real Lie algebra containing the given matrices.
///
/// Saturation loop over an orthonormal basis: each sweep brackets the elements
/// added in the previous sweep against the whole basis and keeps residuals above
/// [`CLOSURE_TOL`]. Basis elements have unit norm, so the threshold is absolute
/// in those units.
pub fn closure_of(n: usize, mats: &[CMatrix]) -> Result<AlgebraBasis> {
    closure_of_tol(n, mats, CLOSURE_TOL)
}

/// [`closure_of`] with an explicit residual threshold.
pub fn closure_of_tol(n: usize, mats: &[CMatrix], tol: f64) -> Result<AlgebraBasis> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let limit = n * n;
    let len = 2 * n * n;
    let mut span = RealSpan::new(len);
    for m in mats {
        let dim = check_square(m)?;
        if dim != n {
            return Err(Error::DimMismatch { expected: n, got: dim });
        }
        let nrm = frobenius_norm(m);
        if nrm > 0.0 {
            span.insert(to_real_vec(m), tol * nrm);
        }
    }
    if span.dim() == 0 {
        return Err(Error::Empty("closure needs at least one nonzero generator"));
    }

    let mut frontier_start = 0;
    let mut depth = 0;
    while frontier_start < span.dim() {
        if depth >= limit {
            return Err(Error::ClosureLimit { limit });
        }
        depth += 1;
        let end = span.dim();
        let elems: Vec<CMatrix> = span.vectors().iter().map(|v| from_real_vec(v, n)).collect();
        for i in frontier_start..end {
            for j in 0..end {
                if j >= frontier_start && j <= i {
                    continue;
                }
                let br = commutator(&elems[i], &elems[j]);
                span.insert(to_real_vec(&br), tol);
                if span.dim() > limit {
                    return Err(Error::ClosureLimit { limit });
                }
            }
        }
        // Pairs among the newly added elements are handled in the next sweep.
        frontier_start = end;
    }
    Ok(AlgebraBasis::from_span(n, span, depth))
}

pub fn lie_closure(sys: &GeneratorSystem) -> Result<AlgebraBasis> {
    let mats: Vec<CMatrix> = sys.matrices().cloned().collect();
    closure_of(sys.n(), &mats)
}

pub fn lie_closure_tol(sys: &GeneratorSystem, tol: f64) -> Result<AlgebraBasis> {
    let mats: Vec<CMatrix> = sys.matrices().cloned().collect();
    closure_of_tol(sys.n(), &mats, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "dim")]
pub enum Controllability {
    Controllable,
    Subgroup(usize),
}

impl Controllability {
    pub fn is_controllable(self) -> bool {
        matches!(self, Controllability::Controllable)
    }
}

/// Verdict for a closure computed from a system on the given ambient group.
pub fn verdict_for(basis: &AlgebraBasis, ambient: Ambient) -> Controllability {
    if basis.dim() == ambient.algebra_dim(basis.n()) {
        Controllability::Controllable
    } else {
        Controllability::Subgroup(basis.dim())
    }
}

pub fn is_transformation_controllable(sys: &GeneratorSystem) -> Result<Controllability> {
    Ok(verdict_for(&lie_closure(sys)?, sys.ambient()))
}

pub fn contains(basis: &AlgebraBasis, x: &CMatrix, tol: f64) -> Result<bool> {
    basis.contains(x, tol)
}
