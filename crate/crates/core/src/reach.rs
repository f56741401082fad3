//! Bang-bang schedules as unitary products, local rank of the product-of-
//! exponentials map, and periodic-flow gates.
//!
//! A word `((t1,a1)…(tk,ak))` evaluates to `exp(t1 X_a1) ⋯ exp(tk X_ak)`, so the
//! last term acts first on a state and word products map to matrix products:
//! `evaluate(s1·s2) = evaluate(s1) evaluate(s2)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::GeneratorSystem;
use crate::linalg::{
    check_square, expm, frobenius_norm, hermitian_eig, identity, is_unitary, real_span_rank, skew_residual, unit,
    CMatrix, DEFAULT_RANK_TOL, I,
};
use crate::words::{ControlWord, Sign};

/// Central-difference step for [`local_rank_f`].
pub const FD_STEP: f64 = 1e-5;
/// Base duration used when probing for generic rank.
pub const GENERIC_BASE: f64 = 0.1;
/// Continued-fraction depth for rationality detection.
pub const MAX_CF_DEPTH: usize = 20;
/// Largest accepted denominator for an eigenphase ratio.
pub const MAX_DENOMINATOR: i64 = 1_000_000;
/// Absolute tolerance on an eigenphase ratio (ratios lie in `[-1, 1]`).
pub const RATIO_TOL: f64 = 1e-12;

/// A control word bound to the system whose generators it names.
#[derive(Debug, Clone)]
pub struct Schedule<'a> {
    word: ControlWord,
    system: &'a GeneratorSystem,
}

impl<'a> Schedule<'a> {
    pub fn new(system: &'a GeneratorSystem, word: ControlWord) -> Result<Self> {
        for (_, name) in word.terms() {
            if system.get(name).is_none() {
                return Err(Error::UnknownGenerator(name.clone()));
            }
        }
        Ok(Self { word, system })
    }

    pub fn word(&self) -> &ControlWord {
        &self.word
    }

    pub fn system(&self) -> &GeneratorSystem {
        self.system
    }

    /// Whether the word is admissible as a forward-time bang-bang control.
    /// Signed words still evaluate (group semantics) but are flagged here.
    pub fn is_bang_bang(&self) -> bool {
        matches!(self.word.classify(), Sign::Positive | Sign::Neutral)
    }

    pub fn evaluate(&self) -> Result<CMatrix> {
        evaluate(self.system, &self.word)
    }
}

/// `exp(t1 X_a1) ⋯ exp(tk X_ak)`.
pub fn evaluate(system: &GeneratorSystem, word: &ControlWord) -> Result<CMatrix> {
    let mut u = identity(system.n());
    for (t, name) in word.terms() {
        let x = system.get(name).ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
        u *= expm(&x.scale(*t))?;
    }
    Ok(u)
}

fn product_map(gens: &[&CMatrix], times: &[f64], n: usize) -> Result<CMatrix> {
    let mut u = identity(n);
    for (x, t) in gens.iter().zip(times) {
        u *= expm(&x.scale(*t))?;
    }
    Ok(u)
}

/// Numerical rank of the differential of `F(t) = Π exp(t_i X_i)` at `base`.
///
/// Column `i` is the right-translated derivative `(∂F/∂t_i) F⁻¹`, approximated
/// by central differences with step [`FD_STEP`]. These columns live in the Lie
/// algebra, so the rank is a dimension count there.
pub fn local_rank_f(sys: &GeneratorSystem, base: &[f64]) -> Result<usize> {
    local_rank_f_tol(sys, base, DEFAULT_RANK_TOL)
}

pub fn local_rank_f_tol(sys: &GeneratorSystem, base: &[f64], tol: f64) -> Result<usize> {
    let gens: Vec<&CMatrix> = sys.matrices().collect();
    if gens.is_empty() {
        return Err(Error::Empty("product map needs at least one generator"));
    }
    if base.len() != gens.len() {
        return Err(Error::DimMismatch { expected: gens.len(), got: base.len() });
    }
    if base.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("base point must be finite".into()));
    }
    let n = sys.n();
    let f_inv = product_map(&gens, base, n)?.adjoint();
    let mut cols = Vec::with_capacity(gens.len());
    for i in 0..gens.len() {
        let mut plus = base.to_vec();
        let mut minus = base.to_vec();
        plus[i] += FD_STEP;
        minus[i] -= FD_STEP;
        if plus[i] == base[i] || minus[i] == base[i] {
            return Err(Error::StepUnderflow(base[i]));
        }
        let h = plus[i] - minus[i];
        let d = (product_map(&gens, &plus, n)? - product_map(&gens, &minus, n)?).unscale(h);
        cols.push(d * &f_inv);
    }
    if cols.iter().all(|c| frobenius_norm(c) == 0.0) {
        return Ok(0);
    }
    Ok(real_span_rank(&cols, tol)?.rank)
}

/// [`local_rank_f`] at the all-[`GENERIC_BASE`] point, retried at a few fixed
/// perturbations when the rank falls short of the generator count.
pub fn generic_local_rank(sys: &GeneratorSystem) -> Result<usize> {
    let k = sys.generators().len();
    let mut best = 0;
    for attempt in 0..4 {
        let base: Vec<f64> = (0..k).map(|i| GENERIC_BASE + 0.0173 * attempt as f64 * (i as f64 + 1.0)).collect();
        best = best.max(local_rank_f(sys, &base)?);
        if best == k {
            break;
        }
    }
    Ok(best)
}

/// Best rational approximation `p/q` of `x` reachable by continued fractions
/// within [`MAX_CF_DEPTH`] terms, [`MAX_DENOMINATOR`] and [`RATIO_TOL`].
pub fn rational_approx(x: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..MAX_CF_DEPTH {
        let a = r.floor();
        if a.abs() > 1e12 {
            return None;
        }
        let ai = a as i64;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if q2 > MAX_DENOMINATOR {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= RATIO_TOL {
            return Some((p2, q2));
        }
        let frac = r - a;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn eigenphases(x: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    // X = iH with H = -iX Hermitian; eigenvalues of X are iθ.
    let e = hermitian_eig(&(x * (-I)))?;
    Ok((e.eigenvalues, e.eigenvectors))
}

fn check_nonzero_skew(x: &CMatrix) -> Result<()> {
    check_square(x)?;
    let nrm = frobenius_norm(x);
    if nrm == 0.0 {
        return Err(Error::InvalidArgument("flow generator must be nonzero".into()));
    }
    let residual = skew_residual(x);
    if residual > 1e-10 * nrm.max(1.0) {
        return Err(Error::NotSkewHermitian { name: "X".into(), residual });
    }
    Ok(())
}

/// Smallest `T > 0` with `‖exp(TX) − 1‖_F ≤ tol`, when the eigenphases of `X`
/// have rational ratios within the detection bounds.
pub fn detect_period(x: &CMatrix, tol: f64) -> Result<Option<f64>> {
    check_nonzero_skew(x)?;
    let (theta, _) = eigenphases(x)?;
    let reference = theta.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    if reference == 0.0 {
        return Err(Error::InvalidArgument("flow generator must be nonzero".into()));
    }
    let mut fracs = Vec::with_capacity(theta.len());
    for &t in &theta {
        match rational_approx(t / reference) {
            Some(pq) => fracs.push(pq),
            None => return Ok(None),
        }
    }
    let mut lcm: i64 = 1;
    for &(_, q) in &fracs {
        lcm = match (lcm / gcd(lcm, q)).checked_mul(q) {
            Some(v) if v <= MAX_DENOMINATOR => v,
            _ => return Ok(None),
        };
    }
    // θ_j = k_j ω with ω = |θ_ref| / lcm and integer k_j.
    let g = fracs.iter().map(|&(p, q)| p * (lcm / q)).fold(0, gcd);
    let omega = reference.abs() / lcm as f64;
    let period = TAU / (omega * g as f64);
    let residual = frobenius_norm(&(expm(&x.scale(period))? - identity(x.nrows())));
    Ok((residual <= tol).then_some(period))
}

/// `(√5 − 1)/2`, the default irrational multiplier.
pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Debug, Clone)]
pub struct DenseGate {
    pub gate: CMatrix,
    pub period: f64,
    pub alpha: f64,
}

/// `g = exp(α T X)` for a periodic flow `exp(tX)` with period `T`.
pub fn dense_gate(x: &CMatrix, alpha: f64) -> Result<DenseGate> {
    let period = detect_period(x, 1e-9)?.ok_or(Error::Aperiodic)?;
    Ok(DenseGate { gate: expm(&x.scale(alpha * period))?, period, alpha })
}

/// Largest angular gap (radians) left by all eigenphases of `g, g², …, g^K`
/// on the unit circle. `basis` must diagonalize `g` (any eigenbasis of the flow).
pub fn eigenphase_gap(g: &CMatrix, basis: &CMatrix, powers: usize) -> f64 {
    let n = g.nrows();
    let vi = basis.adjoint();
    let mut p = identity(n);
    let mut phases = Vec::with_capacity(n * powers);
    for _ in 0..powers {
        p *= g;
        let d = &vi * &p * basis;
        for j in 0..n {
            phases.push(d[(j, j)].arg().rem_euclid(TAU));
        }
    }
    max_circular_gap(phases)
}

pub fn max_circular_gap(mut phases: Vec<f64>) -> f64 {
    if phases.is_empty() {
        return TAU;
    }
    phases.sort_by(f64::total_cmp);
    let wrap = phases[0] + TAU - phases[phases.len() - 1];
    phases.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
}

/// Eigenphase coverage of the powers of a [`dense_gate`] built from `x`.
pub fn dense_gate_coverage(x: &CMatrix, alpha: f64, powers: usize) -> Result<f64> {
    let gate = dense_gate(x, alpha)?;
    let (_, basis) = eigenphases(x)?;
    Ok(eigenphase_gap(&gate.gate, &basis, powers))
}

/// Periodic generators of the diagonal torus through `exp(tX)` in the
/// eigenbasis of `X`, with coefficients `c_k` such that `X = Σ c_k Y_k`.
///
/// With `traceless`, `Y_k = V i(E_kk − E_{k+1,k+1}) V†` (inside `su(n)`),
/// otherwise `Y_k = V i E_kk V†`. Every `Y_k` has period `2π`.
pub fn torus_generators(x: &CMatrix, traceless: bool) -> Result<Vec<(CMatrix, f64)>> {
    check_nonzero_skew(x)?;
    let (theta, v) = eigenphases(x)?;
    let n = theta.len();
    let vd = v.adjoint();
    let conj = |m: CMatrix| &v * m * &vd;
    let out = if traceless {
        let mut acc = 0.0;
        (0..n - 1)
            .map(|k| {
                acc += theta[k];
                (conj((unit(n, k, k) - unit(n, k + 1, k + 1)) * I), acc)
            })
            .collect()
    } else {
        (0..n).map(|k| (conj(unit(n, k, k) * I), theta[k])).collect()
    };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateProvenance {
    pub generator: String,
    pub alpha: f64,
    pub period: f64,
}

/// Gates `g_i = exp(α_i T_i X_i)` whose powers are dense in the flows `exp(t X_i)`.
#[derive(Debug, Clone)]
pub struct GateSet {
    pub gates: Vec<(String, CMatrix)>,
    pub provenance: Vec<GateProvenance>,
}

impl GateSet {
    /// Aperiodic generators are replaced by the periodic generators of their torus.
    pub fn from_system(sys: &GeneratorSystem, alpha: f64) -> Result<Self> {
        let traceless = sys.ambient() == crate::lie::Ambient::SpecialUnitary;
        let mut gates = Vec::new();
        let mut provenance = Vec::new();
        let mut push = |name: String, x: &CMatrix| -> Result<()> {
            let g = dense_gate(x, alpha)?;
            debug_assert!(is_unitary(&g.gate, 1e-10));
            provenance.push(GateProvenance { generator: name.clone(), alpha, period: g.period });
            gates.push((name, g.gate));
            Ok(())
        };
        for (name, x) in sys.generators() {
            if frobenius_norm(x) == 0.0 {
                continue;
            }
            match detect_period(x, 1e-9)? {
                Some(_) => push(name.clone(), x)?,
                None => {
                    for (k, (y, _)) in torus_generators(x, traceless)?.into_iter().enumerate() {
                        push(format!("{name}/t{k}"), &y)?;
                    }
                }
            }
        }
        Ok(Self { gates, provenance })
    }
}
