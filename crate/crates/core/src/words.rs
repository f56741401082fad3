//! Reduced words of timed generator indices: the free control group.
//!
//! A word `((t1,a1)…(tm,am))` is kept in irreducible form: no term with zero
//! duration and no two consecutive terms on the same generator. Durations are
//! compared exactly, so group laws hold bit-for-bit whenever the float sums
//! involved are exact (integers, dyadic fractions).

use std::fmt;

use serde::{Deserialize, Serialize};

/// Sign class of a control word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
    Mixed,
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "RawWord", into = "RawWord")]
pub struct ControlWord {
    terms: Vec<(f64, String)>,
}

#[derive(Serialize, Deserialize)]
struct RawWord {
    terms: Vec<(f64, String)>,
}

impl From<RawWord> for ControlWord {
    fn from(raw: RawWord) -> Self {
        ControlWord::reduce(raw.terms)
    }
}

impl From<ControlWord> for RawWord {
    fn from(w: ControlWord) -> Self {
        RawWord { terms: w.terms }
    }
}

impl ControlWord {
    /// The neutral element (empty word).
    pub fn identity() -> Self {
        Self::default()
    }

    /// Applies the two reduction rules until the word is irreducible.
    pub fn reduce<S: Into<String>>(raw: impl IntoIterator<Item = (f64, S)>) -> Self {
        let mut terms: Vec<(f64, String)> = Vec::new();
        for (t, name) in raw {
            let name = name.into();
            if t == 0.0 {
                continue;
            }
            match terms.last_mut() {
                Some((acc, last)) if *last == name => {
                    *acc += t;
                    if *acc == 0.0 {
                        terms.pop();
                    }
                }
                _ => terms.push((t, name)),
            }
        }
        Self { terms }
    }

    pub fn terms(&self) -> &[(f64, String)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Concatenation followed by reduction.
    pub fn product(&self, other: &ControlWord) -> ControlWord {
        Self::reduce(self.terms.iter().chain(&other.terms).map(|(t, n)| (*t, n.as_str())))
    }

    pub fn inverse(&self) -> ControlWord {
        // Reversal with negation keeps the word irreducible.
        Self { terms: self.terms.iter().rev().map(|(t, n)| (-t, n.clone())).collect() }
    }

    /// `λ·s`: every duration multiplied by `lambda`.
    pub fn scalar(&self, lambda: f64) -> ControlWord {
        Self::reduce(self.terms.iter().map(|(t, n)| (lambda * t, n.as_str())))
    }

    pub fn classify(&self) -> Sign {
        if self.terms.is_empty() {
            Sign::Neutral
        } else if self.terms.iter().all(|(t, _)| *t > 0.0) {
            Sign::Positive
        } else if self.terms.iter().all(|(t, _)| *t < 0.0) {
            Sign::Negative
        } else {
            Sign::Mixed
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.terms.iter().map(|(t, _)| t).sum()
    }

    pub fn is_irreducible(&self) -> bool {
        self.terms.iter().all(|(t, _)| *t != 0.0) && self.terms.windows(2).all(|w| w[0].1 != w[1].1)
    }
}

impl fmt::Display for ControlWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "(")?;
        for (t, n) in &self.terms {
            write!(f, "({t},{n})")?;
        }
        write!(f, ")")
    }
}
