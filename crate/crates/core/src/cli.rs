//! Command-line front end. JSON is the canonical output; CSV and text are
//! rendered from the same values.
//!
//! Exit codes: 0 success, PROVED or CONSISTENT; 1 REFUTED or WITNESS_EXCEEDS;
//! 2 usage or input error; 3 budget exhausted without a decision.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::catalog::{self, BoundReport};
use crate::error::{Error, Result};
use crate::exactmat::{shift_matrix, ExactMatrix};
use crate::field::FieldSpec;
use crate::partitions::Partition;
use crate::reduction::{
    clear_first_column, linear_trace_constraints, trace_condition_verify_with, ShiftPolynomial,
};
use crate::search::{self, Mode, Pruning, SearchConfig, SearchStatus, Verdict};
use crate::spaces::{
    corner_entry_check, direction_nilpotency, verify_all_nilpotent, verify_constant_rank,
    AffineMatrixSpace, Budget, VerificationOutcome, VerificationStatus,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nilspace",
    version,
    about = "Affine spaces of nilpotent matrices of fixed rank"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: NILSPACE_THREADS, else all cores).
    #[arg(long, env = "NILSPACE_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify properties of an affine space given as JSON.
    Verify(VerifyArgs),
    /// Evaluate the closed-form dimension bounds.
    Bounds(BoundsArgs),
    /// Emit an explicit extremal space.
    Witness(WitnessArgs),
    /// Clear the first column of a matrix by a shift-polynomial conjugation.
    Normalize(NormalizeArgs),
    /// Search for the largest space of constant rank.
    Search(SearchArgs),
    /// Test the conjectured maximum against a construction and a search.
    Conjecture(SearchArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Expected field: a prime p or `q` for the rationals.
    #[arg(long, value_parser = parse_field)]
    pub field: Option<FieldSpec>,
    /// Space JSON: {"field", "n", "base", "directions"}.
    #[arg(long)]
    pub input: PathBuf,
    /// Check that every member is nilpotent.
    #[arg(long)]
    pub nilpotent: bool,
    /// Check that every member has this rank.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Check that every element of the direction space is nilpotent.
    #[arg(long)]
    pub directions: bool,
    /// Check that every direction has a zero (n,1) entry (base must be J_n).
    #[arg(long)]
    pub corner: bool,
    /// Check tr(A^m B) = 0 on the span of base and directions for m <= this value.
    #[arg(long)]
    pub trace: Option<usize>,
    /// Largest number of member evaluations for an exact method.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
    /// Random samples when no exact method fits (0 disables sampling).
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: Option<usize>,
    /// Nilindex bound.
    #[arg(long)]
    pub k: Option<usize>,
    /// Field to check each bound's hypothesis against.
    #[arg(long, value_parser = parse_field)]
    pub field: Option<FieldSpec>,
    /// Also evaluate the partition bound for these parts, e.g. 2,2.
    #[arg(long, value_delimiter = ',')]
    pub partition: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    RankFull,
    RankOne,
    Counterexample,
    Conjecture,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long, value_enum)]
    pub kind: WitnessKind,
    /// Matrix size (not needed for the counterexample).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, value_parser = parse_field, default_value = "5")]
    pub field: FieldSpec,
}

#[derive(Args, Debug)]
pub struct NormalizeArgs {
    /// Matrix JSON: {"field", "rows"}.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_field)]
    pub field: Option<FieldSpec>,
    /// 1-based row l with A[l][1] != 0 and zeros below it.
    #[arg(long)]
    pub row: Option<usize>,
    /// Emit the linear trace constraints tr(A^m X) = 0 for m <= this value instead.
    #[arg(long)]
    pub constraints: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    /// Prime p.
    #[arg(long, value_parser = parse_field)]
    pub field: FieldSpec,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = PruningArg::Trace)]
    pub pruning: PruningArg,
    /// Subspace-search nodes per base point.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
    /// Candidate lines examined per base point.
    #[arg(long, default_value_t = 4_000_000_000)]
    pub pool_budget: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Greedy restarts per base point.
    #[arg(long, default_value_t = 16)]
    pub restarts: u32,
    /// Include wall time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PruningArg {
    None,
    Trace,
    Full,
}

fn parse_field(s: &str) -> std::result::Result<FieldSpec, String> {
    match s.to_ascii_lowercase().as_str() {
        "q" | "rational" | "rationals" => Ok(FieldSpec::Rational),
        other => {
            let p: u64 = other
                .parse()
                .map_err(|_| format!("`{s}` is neither a prime nor `q`"))?;
            FieldSpec::prime(p).map_err(|e| e.to_string())
        }
    }
}

impl SearchArgs {
    fn config(&self) -> Result<SearchConfig> {
        let time_limit = match self.time_limit {
            Some(t) if !(t.is_finite() && t > 0.0) => {
                return Err(Error::InvalidArgument(format!(
                    "time limit {t} must be positive"
                )))
            }
            t => t.map(Duration::from_secs_f64),
        };
        Ok(SearchConfig {
            mode: match self.mode {
                ModeArg::Exhaustive => Mode::Exhaustive,
                ModeArg::Greedy => Mode::Greedy,
            },
            pruning: match self.pruning {
                PruningArg::None => Pruning::None,
                PruningArg::Trace => Pruning::Trace,
                PruningArg::Full => Pruning::Full,
            },
            max_nodes: self.budget,
            max_pool: self.pool_budget,
            time_limit,
            seed: self.seed,
            restarts: self.restarts,
            timing: self.timing,
        })
    }
}

/// What a command produced: a JSON value, CSV rows, warnings and an exit code.
struct Report {
    json: Value,
    table: Vec<Vec<(String, String)>>,
    warnings: Vec<String>,
    code: i32,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Inconsistent(_) => EXIT_REFUTED,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and writes the report
/// to `out` (or `--output`) and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    for w in &report.warnings {
        let _ = writeln!(err, "{w}");
    }
    let rendered = match render(&report, cli.format) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, rendered.as_bytes()).map_err(|e| e.to_string()),
        None => out
            .write_all(rendered.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    report.code
}

fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = String::new();
            write_json(&report.json, 0, &mut s)?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", &report.json, &mut lines);
            Ok(lines.join("\n") + "\n")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let rows = if report.table.is_empty() {
                let mut lines = Vec::new();
                flatten("", &report.json, &mut lines);
                lines
                    .into_iter()
                    .map(|l| {
                        let (k, v) = l.split_once(": ").unwrap_or((l.as_str(), ""));
                        vec![
                            ("key".to_string(), k.to_string()),
                            ("value".to_string(), v.to_string()),
                        ]
                    })
                    .collect()
            } else {
                report.table.clone()
            };
            if let Some(first) = rows.first() {
                w.write_record(first.iter().map(|(k, _)| k.as_str()))
                    .map_err(|e| Error::Parse(e.to_string()))?;
            }
            for row in &rows {
                w.write_record(row.iter().map(|(_, v)| v.as_str()))
                    .map_err(|e| Error::Parse(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

/// Indented JSON with arrays of scalars kept on one line, so matrices read as rows.
fn write_json(v: &Value, depth: usize, out: &mut String) -> Result<()> {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k)?);
                out.push_str(": ");
                write_json(x, depth + 1, out)?;
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_json(x, depth + 1, out)?;
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        other => out.push_str(&serde_json::to_string(other)?),
    }
    Ok(())
}

/// `a.b[2].c: value` lines.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&p, x, out);
            }
        }
        Value::Array(items)
            if items.iter().any(|x| x.is_object() || x.is_array()) && !is_matrix(v) =>
        {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}: {s}")),
        other => out.push(format!("{prefix}: {other}")),
    }
}

fn is_matrix(v: &Value) -> bool {
    v.as_array().is_some_and(|rows| {
        rows.iter().all(|r| {
            r.as_array()
                .is_some_and(|xs| xs.iter().all(|x| x.is_number() || x.is_string()))
        })
    })
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn read_input(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn check_field(declared: Option<FieldSpec>, found: FieldSpec) -> Result<()> {
    match declared {
        Some(f) if f != found => Err(Error::FieldMismatch { expected: f, found }),
        _ => Ok(()),
    }
}

fn dispatch(command: &Command) -> Result<Report> {
    match command {
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
        Command::Witness(a) => witness(a),
        Command::Normalize(a) => normalize(a),
        Command::Search(a) => run_search(a),
        Command::Conjecture(a) => conjecture(a),
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    field: FieldSpec,
    n: usize,
    dim: usize,
    checks: Vec<NamedOutcome<'a>>,
}

#[derive(Serialize)]
struct NamedOutcome<'a> {
    check: &'a str,
    #[serde(flatten)]
    outcome: VerificationOutcome,
}

fn verify(a: &VerifyArgs) -> Result<Report> {
    let space: AffineMatrixSpace = serde_json::from_str(&read_input(&a.input)?)?;
    check_field(a.field, space.field())?;
    let budget = Budget {
        max_evaluations: a.budget,
        samples: a.samples,
        seed: a.seed,
    };
    let mut checks = Vec::new();
    let mut warnings = Vec::new();
    let nothing_requested =
        !a.nilpotent && a.rank.is_none() && !a.directions && !a.corner && a.trace.is_none();
    if a.nilpotent || nothing_requested {
        checks.push(NamedOutcome {
            check: "nilpotent",
            outcome: verify_all_nilpotent(&space, &budget)?,
        });
    }
    if let Some(r) = a.rank {
        checks.push(NamedOutcome {
            check: "rank",
            outcome: verify_constant_rank(&space, r, &budget)?,
        });
    }
    if a.directions {
        let out = direction_nilpotency(&space, &budget)?;
        warnings.extend(
            out.notes
                .iter()
                .filter(|n| n.starts_with("warning"))
                .cloned(),
        );
        checks.push(NamedOutcome {
            check: "directions",
            outcome: out,
        });
    }
    if a.corner {
        checks.push(NamedOutcome {
            check: "corner",
            outcome: corner_entry_check(&space)?,
        });
    }
    if let Some(m) = a.trace {
        checks.push(NamedOutcome {
            check: "trace",
            outcome: trace_condition_verify_with(
                &space.span_generators(),
                m,
                space.field(),
                &budget,
            )?,
        });
    }
    let code = if checks.iter().any(|c| c.outcome.is_refuted()) {
        EXIT_REFUTED
    } else if checks.iter().all(|c| c.outcome.is_proved()) {
        EXIT_OK
    } else {
        EXIT_BUDGET
    };
    let table = checks
        .iter()
        .map(|c| {
            vec![
                ("check".to_string(), c.check.to_string()),
                (
                    "status".to_string(),
                    status_name(c.outcome.status).to_string(),
                ),
                (
                    "checks_performed".to_string(),
                    c.outcome.checks_performed.to_string(),
                ),
                (
                    "method".to_string(),
                    to_json(&c.outcome.method)?["kind"]
                        .as_str()
                        .unwrap_or("")
                        .to_string(),
                ),
            ]
            .into_iter()
            .map(Ok)
            .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let json = to_json(&VerifyReport {
        field: space.field(),
        n: space.n(),
        dim: space.dim(),
        checks,
    })?;
    Ok(Report {
        json,
        table,
        warnings,
        code,
    })
}

fn status_name(s: VerificationStatus) -> &'static str {
    match s {
        VerificationStatus::Proved => "PROVED",
        VerificationStatus::Refuted => "REFUTED",
        VerificationStatus::SampledPass => "SAMPLED_PASS",
    }
}

fn bound_rows(bounds: &[BoundReport]) -> Vec<Vec<(String, String)>> {
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    bounds
        .iter()
        .map(|b| {
            vec![
                ("name".to_string(), b.name.clone()),
                ("n".to_string(), b.inputs.n.to_string()),
                ("r".to_string(), opt(b.inputs.r)),
                ("k".to_string(), opt(b.inputs.k)),
                ("value".to_string(), b.value.to_string()),
                ("hypothesis".to_string(), b.hypothesis.clone()),
            ]
        })
        .collect()
}

fn bounds(a: &BoundsArgs) -> Result<Report> {
    let mut list = catalog::applicable_bounds(a.n, a.r, a.k)?;
    if let Some(parts) = &a.partition {
        let p = Partition::from_parts(parts)?;
        if p.n() != a.n {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} does not sum to n = {}",
                a.n
            )));
        }
        list.push(catalog::report_partition(&p));
    }
    let warnings = match a.field {
        Some(f) => list.iter().filter_map(|b| b.warning_for(f)).collect(),
        None => Vec::new(),
    };
    Ok(Report {
        json: to_json(&list)?,
        table: bound_rows(&list),
        warnings,
        code: EXIT_OK,
    })
}

fn witness(a: &WitnessArgs) -> Result<Report> {
    let need_n = || {
        a.n.ok_or_else(|| Error::InvalidArgument("--n is required".into()))
    };
    let mut warnings = Vec::new();
    let (space, hypothesis) = match a.kind {
        WitnessKind::RankFull => {
            let n = need_n()?;
            (
                Some(catalog::witness_rank_full(n, a.field)?),
                Some(catalog::report_rank_full(n)?),
            )
        }
        WitnessKind::RankOne => {
            let n = need_n()?;
            (
                Some(catalog::witness_rank_one(n, a.field)?),
                Some(catalog::report_rank_one(n)?),
            )
        }
        WitnessKind::Counterexample => (Some(catalog::counterexample_f2()), None),
        WitnessKind::Conjecture => {
            let n = need_n()?;
            let r =
                a.r.ok_or_else(|| Error::InvalidArgument("--r is required".into()))?;
            let space = catalog::witness_conjecture(n, r, a.field, &Budget::default())?;
            (space, Some(catalog::report_conjecture(n, r)?))
        }
    };
    if let Some(w) = hypothesis.and_then(|h| h.warning_for(a.field)) {
        warnings.push(w);
    }
    match space {
        Some(space) => Ok(Report {
            json: to_json(&space)?,
            table: Vec::new(),
            warnings,
            code: EXIT_OK,
        }),
        None => {
            warnings.push("no verified construction for these parameters".to_string());
            Ok(Report {
                json: Value::Null,
                table: Vec::new(),
                warnings,
                code: EXIT_BUDGET,
            })
        }
    }
}

#[derive(Serialize)]
struct NormalizeReport {
    row: usize,
    shift_polynomial: ShiftPolynomial,
    conjugated: ExactMatrix,
}

fn normalize(a: &NormalizeArgs) -> Result<Report> {
    let m: ExactMatrix = serde_json::from_str(&read_input(&a.input)?)?;
    check_field(a.field, m.field())?;
    if let Some(m_max) = a.constraints {
        let list = linear_trace_constraints(&m, m_max)?;
        return Ok(Report {
            json: to_json(&list)?,
            table: Vec::new(),
            warnings: Vec::new(),
            code: EXIT_OK,
        });
    }
    let l = a
        .row
        .ok_or_else(|| Error::InvalidArgument("--row or --constraints is required".into()))?;
    let (sp, b) = clear_first_column(&m, l)?;
    Ok(Report {
        json: to_json(&NormalizeReport {
            row: l,
            shift_polynomial: sp,
            conjugated: b,
        })?,
        table: Vec::new(),
        warnings: Vec::new(),
        code: EXIT_OK,
    })
}

/// Warnings for the proven bounds that speak about `(n, r)` over `field`.
fn hypothesis_warnings(n: usize, r: usize, field: FieldSpec) -> Result<Vec<String>> {
    let mut relevant = Vec::new();
    if r + 1 == n {
        relevant.push(catalog::report_rank_full(n)?);
    }
    if r == 1 && n >= 2 {
        relevant.push(catalog::report_rank_one(n)?);
    }
    Ok(relevant
        .iter()
        .filter_map(|b| b.warning_for(field))
        .collect())
}

fn search_row(rep: &search::SearchReport) -> Vec<(String, String)> {
    vec![
        ("n".to_string(), rep.n.to_string()),
        ("r".to_string(), rep.r.to_string()),
        ("p".to_string(), rep.p.to_string()),
        ("max_dim_found".to_string(), rep.max_dim_found.to_string()),
        (
            "status".to_string(),
            match rep.status {
                SearchStatus::Exhaustive => "EXHAUSTIVE",
                SearchStatus::LowerBoundOnly => "LOWER_BOUND_ONLY",
            }
            .to_string(),
        ),
        ("nodes_explored".to_string(), rep.nodes_explored.to_string()),
        (
            "pruned_by_trace".to_string(),
            rep.pruned_by_trace.to_string(),
        ),
        ("pruned_by_rank".to_string(), rep.pruned_by_rank.to_string()),
        ("seed".to_string(), rep.seed.to_string()),
    ]
}

fn require_prime(field: FieldSpec) -> Result<()> {
    match field {
        FieldSpec::Prime(_) => Ok(()),
        FieldSpec::Rational => Err(Error::InvalidArgument("search needs a prime field".into())),
    }
}

fn run_search(a: &SearchArgs) -> Result<Report> {
    require_prime(a.field)?;
    let config = a.config()?;
    let rep = search::max_affine_dimension(a.n, a.r, a.field, &config)?;
    let mut warnings = hypothesis_warnings(a.n, a.r, a.field)?;
    warnings.extend(rep.warnings.iter().cloned());
    let code = if config.mode == Mode::Exhaustive && rep.status != SearchStatus::Exhaustive {
        EXIT_BUDGET
    } else {
        EXIT_OK
    };
    Ok(Report {
        json: to_json(&rep)?,
        table: vec![search_row(&rep)],
        warnings,
        code,
    })
}

fn conjecture(a: &SearchArgs) -> Result<Report> {
    require_prime(a.field)?;
    let config = a.config()?;
    let rep = search::test_conjecture(a.n, a.r, a.field, &config)?;
    let mut warnings = hypothesis_warnings(a.n, a.r, a.field)?;
    warnings.extend(rep.search.warnings.iter().cloned());
    let code = match rep.verdict {
        Verdict::Consistent => EXIT_OK,
        Verdict::WitnessExceeds => {
            warnings.push(format!(
                "WITNESS_EXCEEDS: a verified space of dimension {} beats the conjectured {} over F_{}",
                rep.search.max_dim_found, rep.conjecture_bound, rep.p
            ));
            EXIT_REFUTED
        }
        Verdict::Unresolved => EXIT_BUDGET,
    };
    let mut row = search_row(&rep.search);
    row.insert(
        0,
        (
            "verdict".to_string(),
            to_json(&rep.verdict)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
        ),
    );
    row.push((
        "conjecture_bound".to_string(),
        rep.conjecture_bound.to_string(),
    ));
    Ok(Report {
        json: to_json(&rep)?,
        table: vec![row],
        warnings,
        code,
    })
}

/// Space JSON for `J_n` plus the given directions; a convenience for scripts and tests.
pub fn shift_space_json(
    n: usize,
    field: FieldSpec,
    directions: Vec<ExactMatrix>,
) -> Result<String> {
    let space = AffineMatrixSpace::new(shift_matrix(n, field), directions)?;
    Ok(serde_json::to_string(&space)?)
}
