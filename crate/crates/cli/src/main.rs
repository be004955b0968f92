//! `convex-alloc`: solve, check and benchmark allocation instances on
//! inclusion-free convex bipartite graphs.
//!
//! Exit codes: 0 on success, 1 when the solver (or a Hall check) fails,
//! 2 on malformed input or bad flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convex_alloc::generator::{gen_inclusion_free, gen_planted, ValueRange};
use convex_alloc::hall::{check_hall, HallVerdict};
use convex_alloc::io::{
    instance_to_json, named_bundles, read_instance, result_record, write_instance,
};
use convex_alloc::oracle::{self, optimum};
use convex_alloc::solver::{decide_with_table, default_delta, solve, verify};
use convex_alloc::value::{format_value, parse_value, to_f64, Value};
use convex_alloc::{ConvexInstance, Error, Mode, SolveResult};
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "convex-alloc",
    version,
    about = "Max-Min and Min-Max allocation on inclusion-free convex graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate an instance with the rounded dynamic program.
    Solve(SolveArgs),
    /// Validate an instance and check Hall's condition for its demands.
    Check(InputArgs),
    /// Exact optimum of a small instance.
    Oracle(OracleArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Solve every instance in a directory and compare with the oracle.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Maxmin,
    Minmax,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Maxmin => Mode::MaxMin,
            ModeArg::Minmax => Mode::MinMax,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Instance file.
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Args)]
struct Precision {
    /// Rounding parameter, at least 4.
    #[arg(short, default_value_t = 8)]
    k: u32,
    /// Binary search precision as a rational, e.g. 1/32. Defaults to 1/(4k).
    #[arg(long, value_parser = parse_rational)]
    delta: Option<Value>,
}

impl Precision {
    fn delta(&self) -> Value {
        self.delta.clone().unwrap_or_else(|| default_delta(self.k))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Overrides the mode stored in the instance file.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[command(flatten)]
    precision: Precision,
    /// Write the JSON result here.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the DP table at the final guess here, one marked entry per line.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of agents.
    #[arg(short)]
    n: usize,
    /// Number of items.
    #[arg(short)]
    m: usize,
    #[arg(long, value_enum, default_value = "maxmin")]
    mode: ModeArg,
    /// Plant a `t`-assignment, e.g. `--plant 1`.
    #[arg(long, value_parser = parse_rational)]
    plant: Option<Value>,
    /// Write the instance here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files (`*.json`).
    dir: PathBuf,
    #[command(flatten)]
    precision: Precision,
    #[arg(long)]
    json: bool,
}

fn parse_rational(s: &str) -> Result<Value, String> {
    parse_value(s).map_err(|e| e.to_string())
}

/// A message and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoSolution | Error::InfeasibleAssignment(_) => Failure::solver(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn load(path: &Path) -> Result<ConvexInstance, Failure> {
    let inst = read_instance(path)?;
    let report = inst.validate();
    if !report.is_valid() {
        return Err(Failure::usage(format!("{}: {report}", path.display())));
    }
    Ok(inst)
}

fn write_file(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("json output") + "\n"
}

fn bundles_text(bundles: &BTreeMap<String, Vec<String>>) -> String {
    let mut out = String::new();
    for (agent, items) in bundles {
        let _ = writeln!(out, "  {agent}: {}", items.join(" "));
    }
    out
}

fn solve_text(inst: &ConvexInstance, r: &SolveResult) -> String {
    let label = match inst.mode {
        Mode::MaxMin => "min value",
        Mode::MinMax => "makespan",
    };
    format!(
        "t_star: {}\n{label}: {}\nguarantee: {}\nprobes: {}\nassignment:\n{}",
        format_value(&r.t_star),
        format_value(&r.objective),
        format_value(&r.guarantee),
        r.probes,
        bundles_text(&named_bundles(inst, &r.assignment)),
    )
}

fn cmd_solve(args: SolveArgs) -> CliResult {
    let mut inst = load(&args.input.input)?;
    if let Some(mode) = args.mode {
        inst = inst.with_mode(mode.into());
    }
    let k = args.precision.k;
    let result = solve(&inst, k, &args.precision.delta())?;
    let check = verify(&inst, &result.assignment);
    if check.objective.as_ref() != Some(&result.objective) {
        return Err(Failure::solver("reported objective does not re-verify"));
    }
    let json = to_json(&result_record(&inst, &result));
    if let Some(path) = &args.output {
        write_file(path, &json)?;
    }
    if let Some(path) = &args.trace {
        let table = decide_with_table(&inst, &result.t_star, k)?.table;
        let mut text = String::new();
        for line in table.map(|t| t.trace_lines()).unwrap_or_default() {
            text.push_str(&line);
            text.push('\n');
        }
        write_file(path, &text)?;
    }
    if args.json {
        print!("{json}");
    } else {
        print!("{}", solve_text(&inst, &result));
    }
    Ok(())
}

fn cmd_check(args: InputArgs) -> CliResult {
    let inst = read_instance(&args.input)?;
    let report = inst.validate();
    if !report.is_valid() {
        println!("hall: skipped; inclusion-free: {report}");
        return Err(Failure::usage("instance failed validation"));
    }
    match check_hall(&inst)? {
        HallVerdict::Ok => {
            println!("hall: ok; inclusion-free: ok");
            Ok(())
        }
        HallVerdict::Violated(w) => {
            let unit = match inst.mode {
                Mode::MaxMin => "items",
                Mode::MinMax => "machines",
            };
            println!(
                "hall: violated on {unit} [{}, {}] ({} > {}); inclusion-free: ok",
                w.first + 1,
                w.last + 1,
                format_value(&w.lhs),
                format_value(&w.rhs),
            );
            Err(Failure::solver("Hall's condition fails"))
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> CliResult {
    let inst = load(&args.input.input)?;
    let opt = optimum(&inst)?;
    let bundles = named_bundles(&inst, &opt.witness);
    if args.json {
        print!(
            "{}",
            to_json(&json!({"opt": format_value(&opt.value), "assignment": bundles}))
        );
    } else {
        println!("opt: {}", format_value(&opt.value));
        print!("{}", bundles_text(&bundles));
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> CliResult {
    let mode = args.mode.into();
    let inst = match &args.plant {
        Some(t) => gen_planted(args.seed, args.n, args.m, mode, t)?.0,
        None => gen_inclusion_free(args.seed, args.n, args.m, mode, &ValueRange::unit())?,
    };
    match &args.output {
        Some(path) => write_instance(path, &inst)?,
        None => print!("{}", instance_to_json(&inst)),
    }
    Ok(())
}

struct BenchRow {
    name: String,
    mode: Mode,
    n: usize,
    m: usize,
    objective: Option<Value>,
    opt: Option<Value>,
    guarantee: Option<Value>,
    error: Option<String>,
}

impl BenchRow {
    /// Objective over optimum, or `None` when either is unknown or the optimum is zero.
    fn ratio(&self) -> Option<f64> {
        let (obj, opt) = (self.objective.as_ref()?, self.opt.as_ref()?);
        (to_f64(opt) != 0.0).then(|| to_f64(obj) / to_f64(opt))
    }

    /// Whether the objective meets the guarantee against the optimum.
    fn within(&self) -> Option<bool> {
        let (obj, opt, g) = (
            self.objective.as_ref()?,
            self.opt.as_ref()?,
            self.guarantee.as_ref()?,
        );
        Some(match self.mode {
            Mode::MaxMin => *obj >= g * opt,
            Mode::MinMax => *obj <= g * opt,
        })
    }
}

fn bench_one(path: &Path, k: u32, delta: &Value) -> Result<BenchRow, Failure> {
    let inst = load(path)?;
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let opt = if inst.m() <= oracle::MAX_ITEMS && inst.n() <= oracle::MAX_AGENTS {
        Some(optimum(&inst)?.value)
    } else {
        None
    };
    let mut row = BenchRow {
        name,
        mode: inst.mode,
        n: inst.n(),
        m: inst.m(),
        objective: None,
        opt,
        guarantee: None,
        error: None,
    };
    match solve(&inst, k, delta) {
        Ok(r) => {
            row.objective = Some(r.objective);
            row.guarantee = Some(r.guarantee);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    Ok(row)
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    let entries = std::fs::read_dir(&args.dir)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let k = args.precision.k;
    let delta = args.precision.delta();
    let rows: Vec<BenchRow> = paths
        .par_iter()
        .map(|p| bench_one(p, k, &delta))
        .collect::<Result<_, _>>()?;

    let opt_str = |v: &Option<Value>| v.as_ref().map(format_value);
    if args.json {
        let out: Vec<_> = rows
            .iter()
            .map(|r| {
                json!({
                    "instance": r.name,
                    "mode": r.mode,
                    "n": r.n,
                    "m": r.m,
                    "objective": opt_str(&r.objective),
                    "opt": opt_str(&r.opt),
                    "guarantee": opt_str(&r.guarantee),
                    "within_guarantee": r.within(),
                    "error": r.error,
                })
            })
            .collect();
        print!("{}", to_json(&out));
    } else {
        println!(
            "{:<24} {:<7} {:>3} {:>4} {:>14} {:>14} {:>7} {:>5}",
            "instance", "mode", "n", "m", "objective", "opt", "ratio", "ok"
        );
        for r in &rows {
            let dash = || "-".to_string();
            println!(
                "{:<24} {:<7} {:>3} {:>4} {:>14} {:>14} {:>7} {:>5}",
                r.name,
                r.mode.to_string(),
                r.n,
                r.m,
                r.objective
                    .as_ref()
                    .map(format_value)
                    .unwrap_or_else(|| "fail".into()),
                r.opt.as_ref().map(format_value).unwrap_or_else(dash),
                r.ratio().map(|x| format!("{x:.4}")).unwrap_or_else(dash),
                r.within()
                    .map(|b| if b { "yes" } else { "NO" }.to_string())
                    .unwrap_or_else(dash),
            );
        }
    }
    // a zero optimum means no positive guess can succeed, so an error is expected there
    let zero_opt = |r: &BenchRow| r.opt.as_ref().is_some_and(|v| to_f64(v) == 0.0);
    if rows
        .iter()
        .any(|r| (r.error.is_some() && !zero_opt(r)) || r.within() == Some(false))
    {
        return Err(Failure::solver("some instances failed"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
