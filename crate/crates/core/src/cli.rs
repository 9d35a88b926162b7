//! Command-line front end: search, verify, simulate, emit, bounds and table
//! reproduction.
//!
//! Exit codes: 0 success, 1 a check failed, 2 search exhausted or an
//! endpoint code is too weak, 64 usage, 65 malformed input file, 74 I/O.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{self, BoundExponent, BoundInputs, PathVerification};
use crate::catalog::{self, CatalogError};
use crate::circuit;
use crate::f2::BitVec;
use crate::fixtures;
use crate::pauli::{PauliOp, StabilizerCode};
use crate::rsra::{self, ConversionPath, RsraConfig, RsraError, SearchError};
use crate::sim::{self, OutcomeSchedule, TrialReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SEARCH_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Search(String),
    #[error("{0}")]
    Failed(String),
    /// The reader of standard output went away; not reported.
    #[error("broken pipe")]
    BrokenPipe,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Io(_) => EXIT_IO,
            CliError::Search(_) => EXIT_SEARCH_FAILED,
            CliError::Failed(_) => EXIT_CHECK_FAILED,
            CliError::BrokenPipe => EXIT_OK,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return CliError::BrokenPipe;
        }
        CliError::Io(e.to_string())
    }
}

impl From<std::fmt::Error> for CliError {
    fn from(e: std::fmt::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rsra",
    version,
    about = "Distance-preserving conversion between stabilizer codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a distance-preserving conversion path.
    Convert(ConvertArgs),
    /// Check the distance of every code on a path.
    Verify(VerifyArgs),
    /// Run a path on encoded logical states.
    Simulate(SimulateArgs),
    /// Write the measurement gadgets of a path.
    Emit(EmitArgs),
    /// Print the distance of a code.
    Distance(DistanceArgs),
    /// Failure-probability bounds and the orthogonal-pair probability.
    Bounds(BoundsArgs),
    /// Rebuild and check one of the published conversion tables.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Source code: catalog name, perm(name,cycles), or a code file.
    #[arg(long)]
    pub from: String,
    /// Target code, in the same forms.
    #[arg(long)]
    pub to: String,
    #[arg(long, default_value_t = 0)]
    pub ancillas: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub retries: usize,
    #[arg(long, default_value_t = 3)]
    pub min_distance: usize,
    /// Random coset elements tried per complementary generator.
    #[arg(long, default_value_t = 0)]
    pub gbar_search: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub emit_circuit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub min_distance: usize,
    /// Also report per-step subsystem distances.
    #[arg(long)]
    pub subsystem: bool,
    /// Write the verification result as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// random, all-plus, all-minus, or one of + - ? per step.
    #[arg(long, default_value = "random")]
    pub force_outcomes: String,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    pub code: String,
    /// Largest weight enumerated.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExponentArg {
    DMinusOne,
    D,
}

impl From<ExponentArg> for BoundExponent {
    fn from(e: ExponentArg) -> Self {
        match e {
            ExponentArg::DMinusOne => BoundExponent::DMinusOne,
            ExponentArg::D => BoundExponent::D,
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Largest m in the printed curve.
    #[arg(long, default_value_t = 24)]
    pub m_max: usize,
    /// Size of the exchanged block; defaults to m.
    #[arg(long)]
    pub gc: Option<usize>,
    #[arg(long, value_enum, default_value = "d-minus-one")]
    pub exponent: ExponentArg,
    #[arg(long)]
    pub min_ancilla: bool,
    /// Print the orthogonal-pair probability for this dimension.
    #[arg(long)]
    pub lemma1: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(fixtures::NAMES))]
    pub table: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the rebuilt path as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing the
/// human-readable report to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return e.exit_code();
    }
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(CliError::BrokenPipe) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("RSRA_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "RSRA_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    // A pool may already exist when the CLI runs inside a test process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn dispatch(command: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Convert(a) => convert(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Emit(a) => emit(a, out),
        Command::Distance(a) => distance(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Reproduce(a) => reproduce_cmd(a, out),
    }
}

/// Resolves a catalog name, a `perm(name,cycles)` expression, or a code file
/// in text or JSON form.
pub fn load_code(arg: &str) -> Result<StabilizerCode, CliError> {
    let trimmed = arg.trim();
    if trimmed.starts_with("perm(") || catalog::by_name(trimmed).is_some() {
        return catalog::resolve(trimmed).map_err(|e| match e {
            CatalogError::Code(e) => CliError::Data(e.to_string()),
            e => CliError::Usage(e.to_string()),
        });
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "{arg:?} is neither a catalog code ({}) nor an existing file",
            catalog::NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    StabilizerCode::parse_any(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn load_path(file: &Path) -> Result<ConversionPath, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?;
    ConversionPath::from_json(&text).map_err(|e| CliError::Data(format!("{}: {e}", file.display())))
}

fn write_file(file: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(file, text).map_err(|e| CliError::Io(format!("{}: {e}", file.display())))
}

fn code_label(path: &ConversionPath, i: usize) -> String {
    let last = path.intermediates.len().saturating_sub(1);
    match i {
        0 => "source".into(),
        i if i == last => "target".into(),
        i => format!("after step {}", i - 1),
    }
}

fn witness_text(w: &Option<PauliOp>) -> String {
    w.as_ref().map_or_else(|| "-".into(), |p| p.to_string())
}

fn convert(a: &ConvertArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let source = load_code(&a.from)?;
    let target = load_code(&a.to)?;
    if source.k() != target.k() {
        return Err(CliError::Usage(format!(
            "codes encode different numbers of logical qubits ({} vs {})",
            source.k(),
            target.k()
        )));
    }
    let config = RsraConfig {
        m: a.ancillas,
        seed: a.seed,
        max_retries: a.retries,
        min_distance: a.min_distance,
        gbar_weight_search: a.gbar_search,
    };
    writeln!(
        out,
        "convert [[{},{}]] -> [[{},{}]] with m = {}, seed {}, up to {} draws, distance >= {}",
        source.n(),
        source.k(),
        target.n(),
        target.k(),
        a.ancillas,
        a.seed,
        a.retries,
        a.min_distance
    )?;
    match rsra::search(&source, &target, &config) {
        Ok(found) => {
            let path = &found.path;
            write_file(&a.out, &path.to_json())?;
            writeln!(
                out,
                "found at draw {} ({} rejected)",
                found.retry,
                found.rejected.len()
            )?;
            writeln!(
                out,
                "{} steps on {} qubits, {} multi-qubit gates",
                path.steps.len(),
                path.n,
                circuit::gate_count(path)
            )?;
            writeln!(out, "path written to {}", a.out.display())?;
            if let Some(file) = &a.emit_circuit {
                write_file(file, &circuit::emit(path).to_json())?;
                writeln!(out, "circuit written to {}", file.display())?;
            }
            Ok(EXIT_OK)
        }
        Err(SearchError::Exhausted { error, rejected }) => {
            writeln!(out, "{error}")?;
            let mut histogram: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for r in &rejected {
                *histogram.entry((r.weight, r.code_index)).or_default() += 1;
            }
            writeln!(out, "rejected draws by logical weight and code index:")?;
            for ((weight, index), count) in &histogram {
                writeln!(out, "  weight {weight} at code {index}: {count}")?;
            }
            let best = rejected
                .iter()
                .max_by_key(|r| (r.weight, std::cmp::Reverse(r.retry)));
            if let Some(r) = best {
                writeln!(
                    out,
                    "best draw {}: code {} has logical {} of weight {}",
                    r.retry, r.code_index, r.witness, r.weight
                )?;
            }
            Err(CliError::Search(error.to_string()))
        }
        Err(SearchError::Failed(e)) => Err(search_error(e)),
    }
}

fn search_error(e: RsraError) -> CliError {
    match e {
        RsraError::EndpointDistance { .. } | RsraError::SearchExhausted { .. } => {
            CliError::Search(e.to_string())
        }
        RsraError::MismatchedLogicalCount { .. } => CliError::Usage(e.to_string()),
        e => CliError::Failed(e.to_string()),
    }
}

fn format_verification(path: &ConversionPath, v: &PathVerification) -> Result<String, CliError> {
    let mut s = String::new();
    writeln!(s, "{:>4}  {:<14} {:>9}  witness", "code", "", "distance")?;
    for (i, r) in v.reports.iter().enumerate() {
        let ok = if r.distance.at_least(v.min_distance) {
            "ok"
        } else {
            "FAIL"
        };
        writeln!(
            s,
            "{:>4}  {:<14} {:>9}  {}  {}",
            i,
            code_label(path, i),
            r.distance.to_string(),
            witness_text(&r.witness),
            ok
        )?;
    }
    Ok(s)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let path = load_path(&a.path)?;
    if a.min_distance == 0 {
        return Err(CliError::Usage("--min-distance must be at least 1".into()));
    }
    let adjacency = path.check_adjacency();
    let v = analysis::verify_path(&path, a.min_distance);
    write!(out, "{}", format_verification(&path, &v)?)?;
    if let Some(file) = &a.out {
        let json = serde_json::to_string_pretty(&v).expect("verification serializes");
        write_file(file, &json)?;
    }
    if a.subsystem {
        let t = (a.min_distance - 1) / 2;
        writeln!(out, "subsystem distance per step (t = {t}):")?;
        for (i, step) in path.steps.iter().enumerate() {
            let r = analysis::step_subsystem_distance(&path.intermediates[i], step, a.min_distance)
                .map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(
                out,
                "  step {i}: {:>4}  {}  tolerates {t}: {}",
                r.distance.to_string(),
                witness_text(&r.witness),
                if r.tolerates(t) { "yes" } else { "no" }
            )?;
        }
    }
    match &v.first_failure {
        None => writeln!(
            out,
            "pass: all {} codes have distance >= {}",
            v.reports.len(),
            a.min_distance
        )?,
        Some((i, w)) => writeln!(
            out,
            "fail: code {i} has logical {w} of weight {}",
            w.weight()
        )?,
    }
    if let Err(e) = &adjacency {
        writeln!(out, "fail: {e}")?;
    }
    Ok(if v.pass && adjacency.is_ok() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn outcomes_text(r: &TrialReport) -> String {
    r.outcomes
        .iter()
        .map(|&o| if o > 0 { '+' } else { '-' })
        .collect()
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let schedule: OutcomeSchedule = a
        .force_outcomes
        .parse()
        .map_err(|e: sim::SimError| CliError::Usage(e.to_string()))?;
    let path = load_path(&a.path)?;
    let reports = sim::simulate(&path, a.trials, a.seed, &schedule)
        .map_err(|e| CliError::Data(e.to_string()))?;
    for (i, r) in reports.iter().enumerate() {
        writeln!(
            out,
            "trial {i:>3} {} seed {:#018x} outcomes {:<w$} {}{}",
            r.spec,
            r.seed,
            outcomes_text(r),
            if r.pass { "pass" } else { "FAIL" },
            r.error
                .as_deref()
                .map(|e| format!(" ({e})"))
                .unwrap_or_default(),
            w = path.steps.len().max(1)
        )?;
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let preserved = reports.iter().filter(|r| r.logical_preserved).count();
    writeln!(
        out,
        "{passed}/{} trials pass; logical eigenvalue preserved in {preserved}",
        reports.len()
    )?;
    Ok(if passed == reports.len() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn emit(a: &EmitArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let path = load_path(&a.path)?;
    let bundle = circuit::emit(&path);
    write_file(&a.out, &bundle.to_json())?;
    writeln!(
        out,
        "{} gadgets, {} multi-qubit gates, written to {}",
        bundle.gadgets.len(),
        bundle.total_multiqubit_gates,
        a.out.display()
    )?;
    Ok(EXIT_OK)
}

fn distance(a: &DistanceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let code = load_code(&a.code)?;
    let cap = a.cap.unwrap_or(code.n());
    let r = analysis::code_distance(&code, cap).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(out, "[[{},{}]] distance {}", code.n(), code.k(), r.distance)?;
    if let Some(w) = &r.witness {
        writeln!(out, "witness {w}")?;
    }
    for c in &r.per_weight_counts {
        writeln!(
            out,
            "  weight {}: {} examined, {} with zero syndrome",
            c.weight, c.examined, c.zero_syndrome
        )?;
    }
    Ok(EXIT_OK)
}

fn domain(e: analysis::AnalysisError) -> CliError {
    CliError::Usage(e.to_string())
}

fn bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let exponent = BoundExponent::from(a.exponent);
    let mut printed = false;
    if let (Some(n), Some(d)) = (a.n, a.d) {
        writeln!(out, "failure bound for n = {n}, d = {d}")?;
        writeln!(out, "m,gc,ln_bound,bound,effective")?;
        for m in 0..=a.m_max {
            let gc = a.gc.unwrap_or(m);
            match analysis::failure_bound(BoundInputs { n, m, d, gc }, exponent) {
                Ok(v) => writeln!(
                    out,
                    "{m},{gc},{:.6},{:.6e},{:.6}",
                    v.ln_raw, v.raw, v.effective
                )?,
                Err(e) => writeln!(out, "{m},{gc},,,({e})")?,
            }
        }
        printed = true;
    }
    if a.min_ancilla {
        let (Some(n), Some(d), Some(eps)) = (a.n, a.d, a.eps) else {
            return Err(CliError::Usage(
                "--min-ancilla needs --n, --d and --eps".into(),
            ));
        };
        let r = analysis::min_ancilla(n, d, eps, exponent).map_err(domain)?;
        writeln!(
            out,
            "min ancilla for eps = {eps}: m = {} (bound {:.6e}; d log2(n/d) + log2(1/eps) = {:.3})",
            r.m, r.bound, r.reference
        )?;
        printed = true;
    }
    if let Some(n) = a.lemma1 {
        lemma1_report(n, a, out)?;
        printed = true;
    }
    if !printed {
        return Err(CliError::Usage(
            "nothing to do: give --n and --d, --min-ancilla, or --lemma1".into(),
        ));
    }
    Ok(EXIT_OK)
}

fn lemma1_report(n: usize, a: &BoundsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let exact = analysis::lemma1_exact(n).map_err(domain)?;
    let bound = analysis::lemma1_bound(n);
    writeln!(out, "orthogonal-pair probability for n = {n}")?;
    writeln!(out, "  closed form  {exact} = {:.4}", exact.value())?;
    writeln!(out, "  bound (n-1)/2^n = {bound:.4}")?;
    if n >= 2 {
        let v = BitVec::from_bools((0..n).map(|i| i == 0));
        let w = BitVec::from_bools((0..n).map(|i| i == 1));
        match analysis::lemma1_enumerate(n, &v, &w, analysis::LEMMA1_DEFAULT_BUDGET) {
            Ok(r) => writeln!(out, "  enumerated   {r} = {:.4}", r.value())?,
            Err(e) => writeln!(out, "  enumeration skipped: {e}")?,
        }
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let est = analysis::lemma1_mc(n, &v, &w, a.samples, &mut rng).map_err(domain)?;
        writeln!(
            out,
            "  sampled      {:.4} +- {:.4} ({} samples)",
            est.mean, est.stderr, est.trials
        )?;
    }
    if exact.value() > bound {
        writeln!(
            out,
            "warning: exact value {exact} exceeds the bound {bound:.4} at n = {n}"
        )?;
    }
    Ok(())
}

/// Result of rebuilding a published table.
#[derive(Debug, Clone)]
pub struct Reproduction {
    pub name: String,
    pub path: ConversionPath,
    pub adjacency: Result<(), RsraError>,
    pub verification: PathVerification,
    pub trials: Vec<TrialReport>,
    pub gate_count: usize,
    /// Printed pairs of complementary logicals with their product.
    pub bridges: Vec<(PauliOp, PauliOp, PauliOp)>,
}

/// Gate count printed with the first table.
pub const TABLE1_GATES: usize = 17;
pub const REPRODUCE_DISTANCE: usize = 3;
pub const REPRODUCE_TRIALS: usize = 20;

impl Reproduction {
    pub fn trials_pass(&self) -> bool {
        self.trials.iter().all(|t| t.pass)
    }

    pub fn gates_match(&self) -> bool {
        self.name != "table1" || self.gate_count == TABLE1_GATES
    }

    pub fn pass(&self) -> bool {
        self.adjacency.is_ok() && self.verification.pass && self.trials_pass() && self.gates_match()
    }
}

fn bridge_rows(text: &str) -> Result<Vec<(PauliOp, PauliOp, PauliOp)>, RsraError> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("");
            let f: Vec<&str> = l.split_whitespace().collect();
            (f.first() == Some(&"L") && f.len() == 3).then(|| (i + 1, f[1], f[2]))
        })
        .map(|(line, a, b)| {
            let a = PauliOp::parse_line(a, line)?;
            let b = PauliOp::parse_line(b, line)?;
            let product = a.multiply(&b)?;
            Ok((a, b, product))
        })
        .collect()
}

/// Loads a built-in table, rebuilds its path, and runs the distance check,
/// the simulation trials and the gate count.
pub fn reproduce(name: &str, seed: u64) -> Result<Reproduction, CliError> {
    let text = fixtures::by_name(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown table {name:?} (known: {})",
            fixtures::NAMES.join(", ")
        ))
    })?;
    let internal = |e: RsraError| CliError::Failed(e.to_string());
    let dec = rsra::load_fixture_decomposition(text).map_err(internal)?;
    let path = rsra::build_path(&dec).map_err(internal)?;
    let bridges = bridge_rows(text).map_err(internal)?;
    let verification = analysis::verify_path(&path, REPRODUCE_DISTANCE);
    let trials = sim::simulate(&path, REPRODUCE_TRIALS, seed, &OutcomeSchedule::Random)
        .map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(Reproduction {
        name: name.to_string(),
        adjacency: path.check_adjacency(),
        gate_count: circuit::gate_count(&path),
        path,
        verification,
        trials,
        bridges,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn reproduce_cmd(a: &ReproduceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let r = reproduce(&a.table, a.seed)?;
    let p = &r.path;
    let title = fixtures::by_name(&r.name)
        .and_then(|t| t.lines().next())
        .map_or("", |l| l.trim_start_matches('#').trim());
    writeln!(
        out,
        "{}: {title}; {} qubits, {} steps",
        r.name,
        p.n,
        p.steps.len()
    )?;
    for (l, rr, g) in &r.bridges {
        writeln!(out, "complementary logicals {l} / {rr}, bridge {g}")?;
    }
    write!(out, "{}", format_verification(p, &r.verification)?)?;
    let passed = r.trials.iter().filter(|t| t.pass).count();
    writeln!(out, "adjacent steps: {}", yes_no(r.adjacency.is_ok()))?;
    writeln!(
        out,
        "distance-preserving at d = {}: {}",
        REPRODUCE_DISTANCE,
        yes_no(r.verification.pass)
    )?;
    writeln!(out, "simulation: {passed}/{} trials pass", r.trials.len())?;
    if r.name == "table1" {
        writeln!(
            out,
            "multi-qubit gates: {} (expected {TABLE1_GATES})",
            r.gate_count
        )?;
    } else {
        writeln!(out, "multi-qubit gates: {}", r.gate_count)?;
    }
    if let Some(file) = &a.out {
        write_file(file, &p.to_json())?;
    }
    let pass = r.pass();
    writeln!(
        out,
        "{}",
        if pass { "reproduced" } else { "NOT reproduced" }
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}
