//! `liectl`: file parsing, command dispatch and reports.
//!
//! Exit codes: 0 success, 2 input error, 3 precondition violation, 1 internal error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::grassmann::{adjoint_flow, density_spectrum, grassmann_controllable_tol, CLUSTER_TOL};
use crate::io::{
    matrix_from_json, matrix_to_json, MatrixFile, ParsedState, Report, ScheduleFile, StateFile, SystemFile,
};
use crate::lie::{lie_closure_tol, verdict_for, Controllability, GeneratorSystem};
use crate::linalg::{frobenius_norm, identity, CMatrix};
use crate::reach::Schedule;
use crate::states::{spectrum, transport_witness, DiscreteState, Weight};
use crate::su::{analyze_pair, PairVerdict};
use crate::tensor::{
    chain_plan_with, default_candidate, dim_check_tensor, minimal_extension_tol, product_complement, JoinShape,
    TensorFactorization, Verification,
};
use crate::words::ControlWord;

#[derive(Debug, Parser)]
#[command(name = "liectl", version, about = "Controllability analysis for right-invariant systems on U(n) and SU(n)")]
pub struct Cli {
    /// Numerical threshold for rank, membership and residual decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized choices.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Balanced,
    LeftDeep,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lie closure of a generator system and its controllability verdict.
    Closure { file: PathBuf },
    /// Generator-pair criteria for su(n), on generators `A` and `B` (else the first two).
    Pair { file: PathBuf },
    /// Controllability on the Grassmannian of k-planes.
    Grassmann {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// One-element extension of u(m)⊗1 + 1⊗u(n) to u(mn), or a chain plan.
    Extend {
        m: Option<usize>,
        n: Option<usize>,
        /// Factor dimensions of a multi-factor product.
        #[arg(long, value_delimiter = ',')]
        chain: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Shape::Balanced)]
        shape: Shape,
        /// JSON file `{"matrix": …}` with the candidate element.
        #[arg(long, conflicts_with = "random_candidate")]
        candidate: Option<PathBuf>,
        /// Draw the candidate from the complement of the product subalgebra using `--seed`.
        #[arg(long)]
        random_candidate: bool,
    },
    /// Evaluate a schedule on a system, optionally against a target and an initial density.
    Steer { system: PathBuf, schedule: PathBuf },
    /// Compare two discrete states by spectrum.
    States { first: PathBuf, second: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Precondition(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NotRegular { .. }
            | Error::InsideSubalgebra { .. }
            | Error::Aperiodic
            | Error::StepUnderflow(_)
            | Error::NotEquivalent => CliError::Precondition(msg),
            Error::ClosureLimit { .. } => CliError::Internal(msg),
            _ => CliError::Input(msg),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new(command: &str, cli: &Cli) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update(format!("\0tol={:e}\0seed={}", cli.tol, cli.seed).as_bytes());
        Self { hasher }
    }

    fn arg(&mut self, s: &str) {
        self.hasher.update(b"\0");
        self.hasher.update(s.as_bytes());
    }

    fn read(&mut self, path: &Path) -> CliResult<String> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.arg(&text);
        Ok(text)
    }

    fn parse<T: DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| {
            let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("").trim();
            CliError::Input(format!("{}: {e}\n  | {line}", path.display()))
        })
    }

    fn digest(self) -> String {
        self.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn load_system(inputs: &mut Inputs, path: &Path) -> CliResult<GeneratorSystem> {
    let f: SystemFile = inputs.parse(path)?;
    Ok(f.to_system()?)
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Input(format!("--tol must be positive and finite, got {}", cli.tol)));
    }
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Closure { file } => cmd_closure(cli, file),
        Command::Pair { file } => cmd_pair(cli, file),
        Command::Grassmann { file, k } => cmd_grassmann(cli, file, *k),
        Command::Extend { m, n, chain, shape, candidate, random_candidate } => {
            cmd_extend(cli, *m, *n, chain.as_deref(), *shape, candidate.as_deref(), *random_candidate)
        }
        Command::Steer { system, schedule } => cmd_steer(cli, system, schedule),
        Command::States { first, second } => cmd_states(cli, first, second),
    }?;
    report.timings_ms.insert("total".into(), ms(start));
    Ok(report)
}

fn cmd_closure(cli: &Cli, file: &Path) -> CliResult<Report> {
    let mut inputs = Inputs::new("closure", cli);
    let sys = load_system(&mut inputs, file)?;
    let t = Instant::now();
    let basis = lie_closure_tol(&sys, cli.tol)?;
    let elapsed = ms(t);
    let verdict = verdict_for(&basis, sys.ambient());
    let mut r = Report::new("closure", inputs.digest());
    r.verdict = match verdict {
        Controllability::Controllable => "controllable".into(),
        Controllability::Subgroup(_) => "subgroup".into(),
    };
    r.dimensions.insert("n".into(), sys.n());
    r.dimensions.insert("algebra".into(), basis.dim());
    r.dimensions.insert("ambient_algebra".into(), sys.ambient().algebra_dim(sys.n()));
    r.dimensions.insert("generation_depth".into(), basis.generation_depth());
    r.margins.insert("closure_defect".into(), basis.closure_defect());
    let diagonal = basis
        .basis()
        .iter()
        .filter(|b| {
            let mut off = (*b).clone();
            off.fill_diagonal(num_complex::Complex64::new(0.0, 0.0));
            frobenius_norm(&off) <= cli.tol
        })
        .count();
    r.details = json!({
        "ambient": sys.ambient().to_string(),
        "generators": sys.generators().iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "contains_center": basis.contains_center(),
        "diagonal_basis_elements": diagonal,
    });
    r.timings_ms.insert("closure".into(), elapsed);
    Ok(r)
}

fn pick_pair(sys: &GeneratorSystem) -> CliResult<(CMatrix, CMatrix)> {
    if let (Some(a), Some(b)) = (sys.get("A"), sys.get("B")) {
        return Ok((a.clone(), b.clone()));
    }
    match sys.generators() {
        [(_, a), (_, b), ..] => Ok((a.clone(), b.clone())),
        _ => Err(CliError::Input("pair needs two generators".into())),
    }
}

fn cmd_pair(cli: &Cli, file: &Path) -> CliResult<Report> {
    let mut inputs = Inputs::new("pair", cli);
    let sys = load_system(&mut inputs, file)?;
    let (a, b) = pick_pair(&sys)?;
    let t = Instant::now();
    let an = analyze_pair(&a, &b)?;
    let elapsed = ms(t);
    let mut r = Report::new("pair", inputs.digest());
    r.dimensions.insert("n".into(), an.graph.nodes);
    r.dimensions.insert("edges".into(), an.graph.edges.len());
    r.dimensions.insert("components".into(), an.graph.components().len());
    r.verdict = match &an.verdict {
        PairVerdict::FailsNecessary { .. } => "fails_necessary".into(),
        PairVerdict::SufficientGenerates => "sufficient_generates".into(),
        PairVerdict::InconclusiveThenClosure { dim } => {
            r.dimensions.insert("closure".into(), *dim);
            "inconclusive_then_closure".into()
        }
    };
    r.margins.insert("min_eigenvalue_gap".into(), an.roots.min_gap());
    r.margins.insert("min_root_separation".into(), an.roots.min_root_separation());
    let edges: Vec<[usize; 2]> = an.graph.edges.iter().map(|&(p, q)| [p + 1, q + 1]).collect();
    r.details = json!({
        "strongly_regular": an.strongly_regular,
        "eigenvalues_im": an.roots.eigenvalues.iter().map(|l| l.im).collect::<Vec<_>>(),
        "adjacency": an.graph.adjacency(),
        "edges": edges,
        "components": an.graph.components().iter().map(|c| one_based(c)).collect::<Vec<_>>(),
        "isolated_nodes": one_based(&an.graph.isolated_nodes()),
    });
    r.timings_ms.insert("analysis".into(), elapsed);
    Ok(r)
}

fn cmd_grassmann(cli: &Cli, file: &Path, k: usize) -> CliResult<Report> {
    let mut inputs = Inputs::new("grassmann", cli);
    inputs.arg(&format!("k={k}"));
    let sys = load_system(&mut inputs, file)?;
    let t = Instant::now();
    let v = grassmann_controllable_tol(&sys, k, cli.tol)?;
    let elapsed = ms(t);
    let mut r = Report::new("grassmann", inputs.digest());
    r.verdict = if v.controllable { "controllable" } else { "not_controllable" }.into();
    r.dimensions.insert("n".into(), sys.n());
    r.dimensions.insert("k".into(), k);
    r.dimensions.insert("block_span".into(), v.block_span_dim);
    r.dimensions.insert("required".into(), v.required_dim);
    r.dimensions.insert("closure".into(), v.closure_dim);
    if let Some(m) = v.margin {
        r.margins.insert("block_margin".into(), m);
    }
    r.details = json!({ "vacuous": v.required_dim == 0 });
    r.timings_ms.insert("analysis".into(), elapsed);
    Ok(r)
}

fn random_candidate(m: usize, n: usize, seed: u64) -> CliResult<CMatrix> {
    let mut rng = StdRng::seed_from_u64(seed);
    let complement = product_complement(m, n)?;
    let mut x = CMatrix::zeros(m * n, m * n);
    for b in &complement {
        x += b * num_complex::Complex64::new(rng.random_range(-1.0..1.0), 0.0);
    }
    Ok(x)
}

fn cmd_extend(
    cli: &Cli,
    m: Option<usize>,
    n: Option<usize>,
    chain: Option<&[usize]>,
    shape: Shape,
    candidate: Option<&Path>,
    random: bool,
) -> CliResult<Report> {
    let mut inputs = Inputs::new("extend", cli);
    inputs.arg(&format!("m={m:?} n={n:?} chain={chain:?} shape={shape:?} random={random}"));
    let mut details = serde_json::Map::new();
    let mut dims = std::collections::BTreeMap::new();
    let mut margins = std::collections::BTreeMap::new();
    let mut verdict = None;
    let t = Instant::now();

    match (m, n) {
        (Some(m), Some(n)) => {
            let (x, source) = if let Some(path) = candidate {
                let f: MatrixFile = inputs.parse(path)?;
                (matrix_from_json(&f.matrix)?, "file")
            } else if random {
                (random_candidate(m, n, cli.seed)?, "random")
            } else {
                (default_candidate(m, n)?, "default")
            };
            let ext = minimal_extension_tol(m, n, Some(&x), cli.tol)?;
            dims.insert("m".to_string(), m);
            dims.insert("n".to_string(), n);
            dims.insert("subalgebra".to_string(), m * m + n * n - 1);
            dims.insert("target".to_string(), dim_check_tensor(m, n));
            verdict = Some(match ext.verification {
                Verification::Verified(d) => {
                    dims.insert("closure".to_string(), d);
                    "verified"
                }
                Verification::Failed(d) => {
                    dims.insert("closure".to_string(), d);
                    "failed"
                }
                Verification::UnverifiedSize => "unverified_size",
            });
            margins.insert("distance_from_subalgebra".to_string(), ext.distance_from_subalgebra);
            details.insert("candidate_source".into(), json!(source));
            details.insert("element".into(), json!(matrix_to_json(&ext.element)));
        }
        (None, None) => {}
        _ => return Err(CliError::Input("extend needs both <m> and <n>".into())),
    }

    if let Some(ds) = chain {
        let f = TensorFactorization::new(ds.to_vec())?;
        let shape = match shape {
            Shape::Balanced => JoinShape::Balanced,
            Shape::LeftDeep => JoinShape::LeftDeep,
        };
        let plan = chain_plan_with(&f, shape);
        dims.insert("extensions".to_string(), plan.extension_count);
        dims.insert("total".to_string(), f.total());
        dims.insert("factors".to_string(), f.dims().len());
        details.insert("join_tree".into(), json!(plan.join_tree.to_string()));
        details.insert("join_dims".into(), json!(plan.join_tree.join_dims()));
        verdict.get_or_insert("planned");
    }

    let Some(verdict) = verdict else {
        return Err(CliError::Input("extend needs <m> <n> or --chain".into()));
    };
    let mut r = Report::new("extend", inputs.digest());
    r.verdict = verdict.into();
    r.dimensions = dims;
    r.margins = margins;
    r.details = Value::Object(details);
    r.timings_ms.insert("analysis".into(), ms(t));
    Ok(r)
}

fn cmd_steer(cli: &Cli, system: &Path, schedule: &Path) -> CliResult<Report> {
    let mut inputs = Inputs::new("steer", cli);
    let sys = load_system(&mut inputs, system)?;
    let sf: ScheduleFile = inputs.parse(schedule)?;
    let word = ControlWord::reduce(sf.word.iter().cloned());
    let s = Schedule::new(&sys, word)?;
    let t = Instant::now();
    let u = s.evaluate()?;
    let n = sys.n();
    let id = identity(n);
    let (target, target_name) = match &sf.target {
        Some(m) => (matrix_from_json(m)?, "file"),
        None => (id.clone(), "identity"),
    };
    if target.nrows() != n || target.ncols() != n {
        return Err(Error::DimMismatch { expected: n, got: target.nrows() }.into());
    }
    let fidelity = (target.adjoint() * &u).trace().norm() / n as f64;
    let mut r = Report::new("steer", inputs.digest());
    r.verdict = if 1.0 - fidelity <= cli.tol { "target_reached" } else { "target_missed" }.into();
    r.dimensions.insert("n".into(), n);
    r.dimensions.insert("word_length".into(), s.word().len());
    r.margins.insert("fidelity".into(), fidelity);
    r.margins.insert("identity_residual".into(), frobenius_norm(&(&u - &id)));
    r.margins.insert("unitarity_residual".into(), frobenius_norm(&(u.adjoint() * &u - &id)));
    let mut details = serde_json::Map::new();
    details.insert("word".into(), json!(s.word().to_string()));
    details.insert("sign".into(), json!(s.word().classify()));
    details.insert("bang_bang".into(), json!(s.is_bang_bang()));
    details.insert("target".into(), json!(target_name));
    details.insert("unitary".into(), json!(matrix_to_json(&u)));
    if let Some(rho) = &sf.rho0 {
        let rho0 = matrix_from_json(rho)?;
        let rho1 = adjoint_flow(&rho0, &s)?;
        let preserved = density_spectrum(&rho0)?.matches(&density_spectrum(&rho1)?, CLUSTER_TOL);
        details.insert("rho".into(), json!(matrix_to_json(&rho1)));
        details.insert("spectrum_preserved".into(), json!(preserved));
    }
    r.details = Value::Object(details);
    r.timings_ms.insert("evaluate".into(), ms(t));
    Ok(r)
}

fn state_details<W: Weight>(a: &DiscreteState<W>, b: &DiscreteState<W>, show: impl Fn(&W) -> Value) -> (bool, Value) {
    let sp = |s: &DiscreteState<W>| -> Value {
        spectrum(s).pairs.iter().map(|(w, m)| json!([show(w), m])).collect::<Vec<_>>().into()
    };
    let witness = transport_witness(a, b).ok();
    let details = json!({
        "spectrum_first": sp(a),
        "spectrum_second": sp(b),
        "witness": witness.as_ref().map(|m| m.pairs.clone()),
    });
    (witness.is_some(), details)
}

fn cmd_states(cli: &Cli, first: &Path, second: &Path) -> CliResult<Report> {
    let mut inputs = Inputs::new("states", cli);
    let fa: StateFile = inputs.parse(first)?;
    let fb: StateFile = inputs.parse(second)?;
    let (equivalent, mut details, la, lb) = match (fa.parse()?, fb.parse()?) {
        (ParsedState::Exact(a), ParsedState::Exact(b)) => {
            let (eq, d) = state_details(&a, &b, |w: &Rational64| json!(w.to_string()));
            (eq, d, a.len(), b.len())
        }
        _ => {
            let (a, b) = (fa.to_float()?, fb.to_float()?);
            let (eq, d) = state_details(&a, &b, |w: &f64| json!(w));
            (eq, d, a.len(), b.len())
        }
    };
    details["exact"] = json!(fa.is_exact() && fb.is_exact());
    let mut r = Report::new("states", inputs.digest());
    r.verdict = if equivalent { "equivalent" } else { "not_equivalent" }.into();
    r.dimensions.insert("atoms_first".into(), la);
    r.dimensions.insert("atoms_second".into(), lb);
    r.details = details;
    Ok(r)
}

/// Parses arguments, runs the command, prints the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                println!("{report}");
            }
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::InsideSubalgebra { distance: 0.0 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::NotRegular { gap: 0.0 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::DuplicateName("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::ClosureLimit { limit: 4 }).exit_code(), 1);
    }

    #[test]
    fn chain_only_extend() {
        let cli = Cli::try_parse_from(["liectl", "extend", "--chain", "2,2,2,2,2"]).unwrap();
        let r = run(&cli).unwrap();
        assert_eq!(r.verdict, "planned");
        assert_eq!(r.dimensions["extensions"], 4);
    }

    #[test]
    fn extend_default_and_random() {
        let cli = Cli::try_parse_from(["liectl", "extend", "2", "2"]).unwrap();
        let r = run(&cli).unwrap();
        assert_eq!(r.verdict, "verified");
        assert_eq!(r.dimensions["closure"], 16);
        let cli = Cli::try_parse_from(["liectl", "extend", "2", "2", "--random-candidate", "--seed", "7"]).unwrap();
        let a = run(&cli).unwrap();
        let b = run(&cli).unwrap();
        assert_eq!(a.without_timings(), b.without_timings());
        assert_eq!(a.verdict, "verified");
    }

    #[test]
    fn bad_tolerance_is_input_error() {
        let cli = Cli::try_parse_from(["liectl", "--tol=-1", "extend", "--chain", "2,2"]).unwrap();
        assert_eq!(run(&cli).unwrap_err().exit_code(), 2);
    }
}
