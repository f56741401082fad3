//! JSON interchange formats. Complex matrices are row-major arrays of `[re, im]` pairs.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{Ambient, GeneratorSystem};
use crate::linalg::{c, CMatrix};
use crate::states::DiscreteState;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: bad.len() });
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub name: String,
    pub matrix: MatrixJson,
}

/// `{"n": 2, "ambient": "SU(n)", "generators": [{"name": "x", "matrix": [[[re, im], …], …]}, …]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    pub ambient: Ambient,
    pub generators: Vec<GeneratorEntry>,
}

impl SystemFile {
    pub fn to_system(&self) -> Result<GeneratorSystem> {
        let gens = self
            .generators
            .iter()
            .map(|g| Ok((g.name.clone(), matrix_from_json(&g.matrix)?)))
            .collect::<Result<Vec<_>>>()?;
        GeneratorSystem::new(self.n, self.ambient, gens)
    }

    pub fn from_system(sys: &GeneratorSystem) -> Self {
        Self {
            n: sys.n(),
            ambient: sys.ambient(),
            generators: sys
                .generators()
                .iter()
                .map(|(name, m)| GeneratorEntry { name: name.clone(), matrix: matrix_to_json(m) })
                .collect(),
        }
    }
}

/// `{"system": "<path>", "word": [[t, "name"], …], "target": <matrix>?, "rho0": <matrix>?}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    pub word: Vec<(f64, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<MatrixJson>,
}

/// `{"matrix": <matrix>}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub matrix: MatrixJson,
}

/// A weight given either as a JSON number or as an exact `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightRepr {
    Float(f64),
    Exact(String),
}

/// `{"atoms": [["label", w], …]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub atoms: Vec<(String, WeightRepr)>,
}

/// A parsed state, exact when every weight was given as a fraction.
#[derive(Debug, Clone)]
pub enum ParsedState {
    Exact(DiscreteState<Rational64>),
    Float(DiscreteState<f64>),
}

fn parse_ratio(s: &str) -> Result<Rational64> {
    s.trim().parse::<Rational64>().map_err(|e| Error::InvalidState(format!("bad weight `{s}`: {e}")))
}

fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl StateFile {
    pub fn is_exact(&self) -> bool {
        self.atoms.iter().all(|(_, w)| matches!(w, WeightRepr::Exact(_)))
    }

    pub fn to_exact(&self) -> Result<DiscreteState<Rational64>> {
        let atoms = self
            .atoms
            .iter()
            .map(|(l, w)| match w {
                WeightRepr::Exact(s) => Ok((l.clone(), parse_ratio(s)?)),
                WeightRepr::Float(_) => Err(Error::InvalidState(format!("weight of `{l}` is not exact"))),
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteState::new(atoms)
    }

    pub fn to_float(&self) -> Result<DiscreteState<f64>> {
        let atoms = self
            .atoms
            .iter()
            .map(|(l, w)| match w {
                WeightRepr::Float(x) => Ok((l.clone(), *x)),
                WeightRepr::Exact(s) => Ok((l.clone(), ratio_to_f64(parse_ratio(s)?))),
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteState::new(atoms)
    }

    pub fn parse(&self) -> Result<ParsedState> {
        if self.is_exact() {
            Ok(ParsedState::Exact(self.to_exact()?))
        } else {
            Ok(ParsedState::Float(self.to_float()?))
        }
    }
}

/// Machine-readable result of a CLI command.
///
/// Everything except `timings_ms` is a deterministic function of the inputs and flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub verdict: String,
    pub dimensions: BTreeMap<String, usize>,
    pub margins: BTreeMap<String, f64>,
    pub details: serde_json::Value,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        Self {
            command: command.into(),
            inputs_digest,
            verdict: String::new(),
            dimensions: BTreeMap::new(),
            margins: BTreeMap::new(),
            details: serde_json::Value::Object(Default::default()),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// The report with timings removed, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        Self { timings_ms: BTreeMap::new(), ..self.clone() }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.command, self.verdict)?;
        for (k, v) in &self.dimensions {
            writeln!(f, "  {k:<24} {v}")?;
        }
        for (k, v) in &self.margins {
            writeln!(f, "  {k:<24} {v:.3e}")?;
        }
        if let serde_json::Value::Object(map) = &self.details {
            for (k, v) in map {
                writeln!(f, "  {k:<24} {v}")?;
            }
        }
        write!(f, "  digest {}", &self.inputs_digest[..self.inputs_digest.len().min(16)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let rows: MatrixJson = vec![vec![[0.0, 1.0], [0.1, 0.0]], vec![[-0.1, 0.0], [0.0, -1.0]]];
        let m = matrix_from_json(&rows).unwrap();
        assert_eq!(matrix_to_json(&m), rows);
        assert!(matrix_from_json(&vec![vec![[0.0, 0.0]; 2]]).is_err());
    }

    #[test]
    fn system_file_parses() {
        let s = r#"{"n": 2, "ambient": "SU(n)", "generators": [
            {"name": "z", "matrix": [[[0, 1], [0, 0]], [[0, 0], [0, -1]]]}]}"#;
        let f: SystemFile = serde_json::from_str(s).unwrap();
        let sys = f.to_system().unwrap();
        assert_eq!(sys.generators().len(), 1);
        assert_eq!(SystemFile::from_system(&sys), f);
        let alias: SystemFile = serde_json::from_str(&s.replace("SU(n)", "SU")).unwrap();
        assert_eq!(alias.ambient, Ambient::SpecialUnitary);
    }

    #[test]
    fn state_file_weights() {
        let f: StateFile = serde_json::from_str(r#"{"atoms": [["x", "1/3"], ["y", "2/3"]]}"#).unwrap();
        assert!(matches!(f.parse().unwrap(), ParsedState::Exact(_)));
        let f: StateFile = serde_json::from_str(r#"{"atoms": [["x", 0.25], ["y", "3/4"]]}"#).unwrap();
        assert!(matches!(f.parse().unwrap(), ParsedState::Float(_)));
        let f: StateFile = serde_json::from_str(r#"{"atoms": [["x", "1/x"]]}"#).unwrap();
        assert!(f.parse().is_err());
    }

    #[test]
    fn report_round_trips_bit_exact() {
        let mut r = Report::new("closure", "ab".into());
        r.margins.insert("m".into(), 0.1 + 0.2);
        r.margins.insert("tiny".into(), f64::from_bits(1));
        r.details = serde_json::json!({"x": 1.0 / 3.0});
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.margins["m"].to_bits(), (0.1f64 + 0.2).to_bits());
    }
}
