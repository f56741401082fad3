//! Discrete mixed states (finitely supported probability distributions) and
//! their classification by spectrum.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Debug;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight arithmetic for [`DiscreteState`]: exact for rationals, tolerant for floats.
pub trait Weight: Copy + Debug + PartialOrd {
    fn is_positive(&self) -> bool;
    fn at_most_one(&self) -> bool;
    fn sums_to_one(ws: &[Self]) -> bool;
    fn same(a: &Self, b: &Self) -> bool;
    fn total_cmp(a: &Self, b: &Self) -> Ordering;
}

impl Weight for Rational64 {
    fn is_positive(&self) -> bool {
        *self > Rational64::from_integer(0)
    }

    fn at_most_one(&self) -> bool {
        *self <= Rational64::from_integer(1)
    }

    fn sums_to_one(ws: &[Self]) -> bool {
        ws.iter().copied().sum::<Rational64>() == Rational64::from_integer(1)
    }

    fn same(a: &Self, b: &Self) -> bool {
        a == b
    }

    fn total_cmp(a: &Self, b: &Self) -> Ordering {
        a.cmp(b)
    }
}

/// Float weights sum to one within this tolerance.
pub const FLOAT_SUM_TOL: f64 = 1e-12;
/// Float weights compare equal within this tolerance.
pub const FLOAT_WEIGHT_TOL: f64 = 1e-10;

impl Weight for f64 {
    fn is_positive(&self) -> bool {
        *self > 0.0 && self.is_finite()
    }

    fn at_most_one(&self) -> bool {
        *self <= 1.0 + FLOAT_SUM_TOL
    }

    fn sums_to_one(ws: &[Self]) -> bool {
        (ws.iter().sum::<f64>() - 1.0).abs() <= FLOAT_SUM_TOL
    }

    fn same(a: &Self, b: &Self) -> bool {
        (a - b).abs() <= FLOAT_WEIGHT_TOL
    }

    fn total_cmp(a: &Self, b: &Self) -> Ordering {
        f64::total_cmp(a, b)
    }
}

/// Finite set of labelled points with positive weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteState<W> {
    atoms: Vec<(String, W)>,
}

impl<W: Weight> DiscreteState<W> {
    pub fn new<S: Into<String>>(atoms: impl IntoIterator<Item = (S, W)>) -> Result<Self> {
        let atoms: Vec<(String, W)> = atoms.into_iter().map(|(l, w)| (l.into(), w)).collect();
        if atoms.is_empty() {
            return Err(Error::InvalidState("a state needs at least one atom".into()));
        }
        let mut seen = HashSet::new();
        for (label, w) in &atoms {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidState(format!("duplicate label `{label}`")));
            }
            if !w.is_positive() || !w.at_most_one() {
                return Err(Error::InvalidState(format!("weight of `{label}` must lie in (0, 1], got {w:?}")));
            }
        }
        let ws: Vec<W> = atoms.iter().map(|(_, w)| *w).collect();
        if !W::sums_to_one(&ws) {
            return Err(Error::InvalidState("weights do not sum to 1".into()));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(String, W)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Applies a relabeling of the support points.
    pub fn relabeled(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        Self::new(self.atoms.iter().map(|(l, w)| (f(l), *w)))
    }
}

/// Pairs `(weight, multiplicity)` with weights strictly decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpectrum<W> {
    pub pairs: Vec<(W, usize)>,
}

impl<W: Weight> StateSpectrum<W> {
    pub fn matches(&self, other: &Self) -> bool {
        self.pairs.len() == other.pairs.len()
            && self.pairs.iter().zip(&other.pairs).all(|((a, m), (b, n))| m == n && W::same(a, b))
    }
}

pub fn spectrum<W: Weight>(rho: &DiscreteState<W>) -> StateSpectrum<W> {
    let mut ws: Vec<W> = rho.atoms.iter().map(|(_, w)| *w).collect();
    ws.sort_by(|a, b| W::total_cmp(b, a));
    let mut pairs: Vec<(W, usize)> = Vec::new();
    for w in ws {
        match pairs.last_mut() {
            Some((head, m)) if W::same(head, &w) => *m += 1,
            _ => pairs.push((w, 1)),
        }
    }
    StateSpectrum { pairs }
}

pub fn equivalent<W: Weight>(a: &DiscreteState<W>, b: &DiscreteState<W>) -> bool {
    spectrum(a).matches(&spectrum(b))
}

/// Bijection between supports, as `(from, to)` label pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(String, String)>,
}

fn sorted_atoms<W: Weight>(rho: &DiscreteState<W>) -> Vec<&(String, W)> {
    let mut atoms: Vec<&(String, W)> = rho.atoms.iter().collect();
    atoms.sort_by(|(la, wa), (lb, wb)| W::total_cmp(wa, wb).then_with(|| la.cmp(lb)));
    atoms
}

/// Pairs atoms of equal weight after sorting both supports by ascending weight
/// (ties by label).
pub fn transport_witness<W: Weight>(a: &DiscreteState<W>, b: &DiscreteState<W>) -> Result<Matching> {
    if !equivalent(a, b) {
        return Err(Error::NotEquivalent);
    }
    let pairs =
        sorted_atoms(a).into_iter().zip(sorted_atoms(b)).map(|((x, _), (y, _))| (x.clone(), y.clone())).collect();
    Ok(Matching { pairs })
}

impl Matching {
    /// Whether every pair carries equal weight and the pairing is a bijection of the supports.
    pub fn preserves_weights<W: Weight>(&self, a: &DiscreteState<W>, b: &DiscreteState<W>) -> bool {
        let weight = |s: &DiscreteState<W>, l: &str| s.atoms.iter().find(|(x, _)| x == l).map(|(_, w)| *w);
        let from: HashSet<&str> = self.pairs.iter().map(|(x, _)| x.as_str()).collect();
        let to: HashSet<&str> = self.pairs.iter().map(|(_, y)| y.as_str()).collect();
        from.len() == a.len()
            && to.len() == b.len()
            && self.pairs.len() == a.len()
            && self.pairs.iter().all(|(x, y)| match (weight(a, x), weight(b, y)) {
                (Some(wa), Some(wb)) => W::same(&wa, &wb),
                _ => false,
            })
    }
}
