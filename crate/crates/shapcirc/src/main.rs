//! Command-line interface: expected values and expected Shapley-like scores
//! of deterministic-decomposable circuits, circuit transformation and
//! validation, and the probabilistic-database provenance pipeline.
//!
//! Output is tab-separated on stdout and deterministic: identical inputs and
//! flags produce byte-identical output. Diagnostics go to stderr. Exit codes:
//! 0 on success, 1 on usage errors (bad flags or flag combinations), 2 on
//! input or validation errors (unreadable files, malformed formats,
//! structurally invalid circuits, guard violations).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;

use shapcirc::circuit::{Circuit, Determinism, VarId, DEFAULT_DETERMINISM_BUDGET};
use shapcirc::coeffs::{CoefficientFunction, CustomTable};
use shapcirc::error::Error;
use shapcirc::numeric::{render_decimal, render_rational, Rational};
use shapcirc::provenance::{fact_escore, ConjunctiveQuery, TidDatabase};
use shapcirc::reductions::escore_via_ev;
use shapcirc::scores::{
    ev, ev_dd, score_all, score_all_f64, Method, Probabilities, ScoreReport,
};
use shapcirc::transform::tighten;

#[derive(Parser)]
#[command(
    name = "shapcirc",
    version,
    about = "Expected Shapley-like scores of Boolean functions given as deterministic-decomposable circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected value of the circuit under the given probabilities.
    Ev(EvArgs),
    /// Expected Shapley scores (alias for `score --coeff shapley`).
    Shapley(ScoreArgs),
    /// Expected Banzhaf scores through the fast conditioning path.
    Banzhaf(BanzhafArgs),
    /// Expected scores under a chosen coefficient function.
    Score(ScoreWithCoeffArgs),
    /// Rewrite a circuit (currently: tighten it).
    Transform(TransformArgs),
    /// Structural diagnosis of a circuit file.
    Validate(ValidateArgs),
    /// Per-fact expected scores of a conjunctive query over a TID database.
    Provenance(ProvenanceArgs),
    /// Brute-force utilities and test-fixture generators.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct EvArgs {
    /// Circuit file in the ddc format.
    #[arg(long)]
    circuit: PathBuf,
    /// Probability file: lines `<varId> <rational-or-decimal>`.
    #[arg(long)]
    probs: PathBuf,
    /// How to compute the value.
    #[arg(long, value_enum, default_value_t = EvMethod::Direct)]
    method: EvMethod,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvMethod {
    /// Single sweep over the tightened circuit.
    Direct,
    /// Reduce to expected Shapley scores and sum them.
    Reduction,
    /// Enumerate all variable subsets (guarded).
    Oracle,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["var", "all"])))]
struct ScoreArgs {
    /// Circuit file in the ddc format.
    #[arg(long)]
    circuit: PathBuf,
    /// Probability file: lines `<varId> <rational-or-decimal>`.
    #[arg(long)]
    probs: PathBuf,
    /// Score a single variable.
    #[arg(long)]
    var: Option<VarId>,
    /// Score every variable of the universe.
    #[arg(long)]
    all: bool,
    /// Algorithm selection.
    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    method: MethodArg,
    /// Use f64 arithmetic instead of exact rationals (direct algorithms
    /// only); the rational output column shows `~`.
    #[arg(long)]
    float: bool,
    /// With `--method reduction`: print one `trace` row per oracle call
    /// (variable, call ordinal, transformed probabilities, answer).
    #[arg(long)]
    trace_oracle: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["var", "all"])))]
struct BanzhafArgs {
    /// Circuit file in the ddc format.
    #[arg(long)]
    circuit: PathBuf,
    /// Probability file: lines `<varId> <rational-or-decimal>`.
    #[arg(long)]
    probs: PathBuf,
    /// Score a single variable.
    #[arg(long)]
    var: Option<VarId>,
    /// Score every variable of the universe.
    #[arg(long)]
    all: bool,
    /// Use f64 arithmetic instead of exact rationals.
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct ScoreWithCoeffArgs {
    /// Coefficient function: `shapley`, `banzhaf`, `penrose`, or
    /// `table:<path>` with a `k<TAB>l<TAB>p/q` file.
    #[arg(long)]
    coeff: String,
    #[command(flatten)]
    rest: ScoreArgs,
}

#[derive(Args)]
struct TransformArgs {
    /// Make the circuit tight: binary gates, smooth deterministic ORs,
    /// output scope covering the whole universe.
    #[arg(long)]
    tighten: bool,
    /// Circuit file in the ddc format.
    #[arg(long)]
    circuit: PathBuf,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Circuit file in the ddc format.
    #[arg(long)]
    circuit: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["fact", "all"])))]
struct ProvenanceArgs {
    /// Directory of CSV tables (one relation per `*.csv` file).
    #[arg(long)]
    data: PathBuf,
    /// Query file in the cq format.
    #[arg(long)]
    query: PathBuf,
    /// Coefficient function: `shapley`, `banzhaf`, `penrose`, or `table:<path>`.
    #[arg(long, default_value = "shapley")]
    coeff: String,
    /// Score a single fact, e.g. `Students#1`.
    #[arg(long)]
    fact: Option<String>,
    /// Score every fact of the database.
    #[arg(long)]
    all: bool,
    /// Algorithm selection.
    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    method: MethodArg,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    what: OracleCommand,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Generate a random deterministic-decomposable circuit from a decision
    /// tree and print it in the ddc format.
    RandomDd {
        /// RNG seed; the same seed always produces the same circuit.
        #[arg(long)]
        seed: u64,
        /// Number of variables in the universe.
        #[arg(long)]
        num_vars: u32,
        /// Maximum decision-tree depth.
        #[arg(long)]
        depth: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Dynamic-programming sweep over the tightened circuit.
    Direct,
    /// Interpolation reductions through an expected-value backend.
    Reduction,
    /// Closed form for a shared probability (requires uniform probabilities).
    Equalprob,
    /// Brute-force enumeration (guarded).
    Oracle,
}

impl MethodArg {
    fn to_method(self) -> Method {
        match self {
            MethodArg::Direct => Method::Direct,
            MethodArg::Reduction => Method::Reduction,
            MethodArg::Equalprob => Method::EqualProb,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

/// A failed run, classified by exit code.
enum Failure {
    /// Exit 1: the command line itself is wrong.
    Usage(String),
    /// Exit 2: inputs are unreadable, malformed, or invalid.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type RunResult = Result<(), Failure>;

fn main() -> ExitCode {
    // Die quietly when stdout is closed early (`shapcirc … | head`), like
    // any other unix filter, instead of panicking on the broken pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Ev(args) => run_ev(args),
        Command::Shapley(args) => run_score(CoefficientFunction::Shapley, args),
        Command::Banzhaf(args) => run_banzhaf(args),
        Command::Score(args) => {
            resolve_coeff(&args.coeff).and_then(|cf| run_score(cf, args.rest))
        }
        Command::Transform(args) => run_transform(args),
        Command::Validate(args) => run_validate(args),
        Command::Provenance(args) => run_provenance(args),
        Command::Oracle(args) => run_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    let text = read_file(path)?;
    Circuit::parse(&text).map_err(Failure::from)
}

fn load_probs(path: &Path) -> Result<Probabilities, Failure> {
    let text = read_file(path)?;
    Probabilities::parse(&text).map_err(Failure::from)
}

fn resolve_coeff(name: &str) -> Result<CoefficientFunction, Failure> {
    match name {
        "shapley" => Ok(CoefficientFunction::Shapley),
        "banzhaf" => Ok(CoefficientFunction::Banzhaf),
        "penrose" => Ok(CoefficientFunction::PenroseBanzhaf),
        other => {
            if let Some(path) = other.strip_prefix("table:") {
                let text = read_file(Path::new(path))?;
                let table = CustomTable::parse(&text).map_err(Failure::from)?;
                Ok(CoefficientFunction::Custom(table))
            } else {
                Err(Failure::Usage(format!(
                    "unknown coefficient function {other:?}; use shapley, banzhaf, penrose, or table:<path>"
                )))
            }
        }
    }
}

fn render_probabilities(p: &Probabilities) -> String {
    let mut out = String::new();
    for (i, (v, r)) in p.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}:{}", render_rational(r));
    }
    out
}

fn run_ev(args: EvArgs) -> RunResult {
    let c = load_circuit(&args.circuit)?;
    let p = load_probs(&args.probs)?;
    let value = match args.method {
        EvMethod::Direct => ev(&c, &p)?,
        EvMethod::Reduction => {
            let shapley = CoefficientFunction::Shapley;
            shapcirc::reductions::ev_from_eshapley(
                |cc, pp, x| shapcirc::scores::escore_dd(cc, pp, x, &shapley),
                &c,
                &p,
            )?
        }
        EvMethod::Oracle => shapcirc::oracle::brute_ev(&c, &p)?,
    };
    println!(
        "ev\t{}\t{}",
        render_rational(&value),
        render_decimal(&value)
    );
    Ok(())
}

fn score_targets(c: &Circuit, var: Option<VarId>, all: bool) -> Result<Vec<VarId>, Failure> {
    if all {
        Ok(c.universe().iter().collect())
    } else {
        let v = var.ok_or_else(|| Failure::Usage("pass --var <id> or --all".to_string()))?;
        Ok(vec![v])
    }
}

fn print_exact_report(report: &ScoreReport) {
    for (v, score) in &report.scores {
        println!("{v}\t{}\t{}", render_rational(score), render_decimal(score));
    }
}

fn run_score(cf: CoefficientFunction, args: ScoreArgs) -> RunResult {
    if args.trace_oracle && args.method != MethodArg::Reduction {
        return Err(Failure::Usage(
            "--trace-oracle only applies to --method reduction".to_string(),
        ));
    }
    if args.float && matches!(args.method, MethodArg::Reduction | MethodArg::Oracle) {
        return Err(Failure::Usage(
            "--float supports only the direct and equalprob methods".to_string(),
        ));
    }
    let c = load_circuit(&args.circuit)?;
    let p = load_probs(&args.probs)?;
    let targets = score_targets(&c, args.var, args.all)?;
    if args.trace_oracle {
        return run_traced_reduction(&c, &p, &cf, &targets);
    }
    if args.float {
        let scores = score_all_f64(&c, &p, &cf, args.method.to_method(), &targets)?;
        for (v, score) in &scores {
            println!("{v}\t~\t{score}");
        }
        return Ok(());
    }
    let report = score_all(&c, &p, &cf, args.method.to_method(), &targets)?;
    print_exact_report(&report);
    Ok(())
}

/// The reduction path with each backend call logged: rows
/// `trace<TAB>var<TAB>call<TAB>probabilities<TAB>answer` precede the
/// variable's score row.
fn run_traced_reduction(
    c: &Circuit,
    p: &Probabilities,
    cf: &CoefficientFunction,
    targets: &[VarId],
) -> RunResult {
    let tight = tighten(c).map_err(Failure::from)?;
    for &x in targets {
        let mut call = 0usize;
        let score = escore_via_ev(
            |cc, pp| {
                let answer = ev_dd(cc, pp)?;
                call += 1;
                println!(
                    "trace\t{x}\t{call}\t{}\t{}",
                    render_probabilities(pp),
                    render_rational(&answer)
                );
                Ok(answer)
            },
            &tight,
            p,
            x,
            cf,
        )
        .map_err(Failure::from)?;
        println!("{x}\t{}\t{}", render_rational(&score), render_decimal(&score));
    }
    Ok(())
}

fn run_banzhaf(args: BanzhafArgs) -> RunResult {
    let c = load_circuit(&args.circuit)?;
    let p = load_probs(&args.probs)?;
    let targets = score_targets(&c, args.var, args.all)?;
    if args.float {
        let scores = score_all_f64(
            &c,
            &p,
            &CoefficientFunction::Banzhaf,
            Method::BanzhafFast,
            &targets,
        )?;
        for (v, score) in &scores {
            println!("{v}\t~\t{score}");
        }
        return Ok(());
    }
    let report = score_all(
        &c,
        &p,
        &CoefficientFunction::Banzhaf,
        Method::BanzhafFast,
        &targets,
    )?;
    print_exact_report(&report);
    Ok(())
}

fn run_transform(args: TransformArgs) -> RunResult {
    if !args.tighten {
        return Err(Failure::Usage(
            "transform currently requires --tighten".to_string(),
        ));
    }
    let c = load_circuit(&args.circuit)?;
    let tight = tighten(&c).map_err(Failure::from)?;
    let text = tight.serialize().map_err(Failure::from)?;
    match args.out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_validate(args: ValidateArgs) -> RunResult {
    let c = load_circuit(&args.circuit)?;
    let report = c.analyze_structure(DEFAULT_DETERMINISM_BUDGET);
    let deterministic = match &report.deterministic {
        Determinism::Verified => "verified".to_string(),
        Determinism::Refuted { gate, witness } => {
            format!("refuted at gate {} by {:?}", gate.0, witness.as_slice())
        }
        Determinism::Unchecked => "unchecked".to_string(),
    };
    println!("universe\t{}", c.universe().len());
    println!("gates\t{}", c.num_gates());
    println!("wires\t{}", c.num_wires());
    println!("decomposable\t{}", report.decomposable);
    println!("deterministic\t{deterministic}");
    println!("smooth\t{}", report.smooth);
    println!("tight\t{}", report.tight);
    let ok = report.decomposable && !matches!(report.deterministic, Determinism::Refuted { .. });
    if ok {
        Ok(())
    } else {
        Err(Failure::Input(
            "circuit is not deterministic-decomposable".to_string(),
        ))
    }
}

fn run_provenance(args: ProvenanceArgs) -> RunResult {
    let cf = resolve_coeff(&args.coeff)?;
    let db = TidDatabase::load_dir(&args.data).map_err(Failure::from)?;
    let query_text = read_file(&args.query)?;
    let q = ConjunctiveQuery::parse(&query_text).map_err(Failure::from)?;
    let result = fact_escore(&db, &q, &cf, args.method.to_method()).map_err(Failure::from)?;
    println!("provenance\t{}", result.dnf.render(&db));
    println!(
        "probability\t{}\t{}",
        render_rational(&result.probability),
        render_decimal(&result.probability)
    );
    let selected: Vec<VarId> = if args.all {
        db.universe().iter().collect()
    } else {
        let fact_id = args
            .fact
            .as_deref()
            .ok_or_else(|| Failure::Usage("pass --fact <Table#row> or --all".to_string()))?;
        vec![db.fact_var(fact_id).map_err(Failure::from)?]
    };
    for v in selected {
        let label = db.fact_label(v).unwrap_or("?");
        let score = result
            .report
            .scores
            .get(&v)
            .cloned()
            .unwrap_or_else(Rational::zero);
        println!(
            "{label}\t{}\t{}",
            render_rational(&score),
            render_decimal(&score)
        );
    }
    Ok(())
}

fn run_oracle(args: OracleArgs) -> RunResult {
    match args.what {
        OracleCommand::RandomDd {
            seed,
            num_vars,
            depth,
        } => {
            let c = shapcirc::oracle::random_dd(seed, num_vars, depth);
            let text = c.serialize().map_err(Failure::from)?;
            print!("{text}");
            Ok(())
        }
    }
}
