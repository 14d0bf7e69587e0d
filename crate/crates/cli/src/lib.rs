//! Command-line front end for `qcr-core`.
//!
//! Every subcommand except `convert` prints one JSON object on stdout with a
//! fixed key set; keys that do not apply to the subcommand are `null`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qcr_core::bnb::{self, BnbConfig};
use qcr_core::enumerate::brute_force;
use qcr_core::io::{self, Format};
use qcr_core::{descend, trivial_shift, DescentParams, Error, LmiSystem, QuboProblem};

/// Largest instance the `brute` subcommand will enumerate.
pub const BRUTE_MAX_N: usize = 25;

#[derive(Debug, Parser)]
#[command(name = "qcr", version, about = "QUBO dual bounds and exact branch-and-bound")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve to proven optimality (or a limit) with branch-and-bound.
    Solve(RunArgs),
    /// Compute a single dual bound by descent from the trivial shift.
    Bound(RunArgs),
    /// Exact maximum by enumeration (n <= 25).
    Brute(RunArgs),
    /// Re-serialize an instance in triplet format.
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "triplet", value_parser = parse_format)]
    pub format: Format,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 3600.0, value_parser = positive_f64)]
    pub time_limit: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub node_limit: Option<u64>,
    /// Outer descent iterations (default 50000 for `bound`, 5 per node for `solve`).
    #[arg(long = "iters", short = 'N')]
    pub max_iters: Option<usize>,
    /// Bisection steps per outer iteration.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k1: Option<u64>,
    /// Consecutive boundary iterations before stopping.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k2: Option<u64>,
    /// Known objective value used as the initial incumbent.
    #[arg(long)]
    pub primal: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start every node cold instead of projecting the parent's shift.
    #[arg(long)]
    pub no_warmstart: bool,
    /// Also write the JSON result to this file.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    /// Progress records on stderr, one JSON object per line (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "maxcut", value_parser = parse_format)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

/// Failure with the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::EmptyProblem => CliError::input(e.to_string()),
            _ => CliError::numeric(e.to_string()),
        }
    }
}

/// Parameters echoed in every report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportParams {
    pub format: &'static str,
    pub time_limit_s: Option<f64>,
    pub node_limit: Option<u64>,
    pub iters: Option<usize>,
    pub k1: Option<usize>,
    pub k2: Option<usize>,
    pub root_iters: Option<usize>,
    pub root_k1: Option<usize>,
    pub warmstart: Option<bool>,
    pub primal: Option<f64>,
}

/// The JSON result object.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub status: String,
    pub n: usize,
    pub best_value: Option<f64>,
    pub best_x: Option<Vec<u8>>,
    pub bound: Option<f64>,
    pub rel_gap_percent: Option<f64>,
    pub nodes: Option<u64>,
    pub iterations: Option<u64>,
    pub termination: Option<String>,
    pub u_hat: Option<Vec<f64>>,
    pub wall_time_s: f64,
    pub seed: u64,
    pub params: ReportParams,
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Triplet => "triplet",
        Format::MaxCut => "maxcut",
    }
}

fn read_problem(path: &PathBuf, format: Format) -> Result<QuboProblem, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    io::parse(&text, format).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn usize_of(v: Option<u64>) -> Option<usize> {
    v.map(|v| v as usize)
}

fn apply_overrides(mut p: DescentParams, args: &RunArgs) -> DescentParams {
    if let Some(n) = args.max_iters {
        p.max_iters = n;
    }
    if let Some(k1) = usize_of(args.k1) {
        p.bisection_steps = k1;
    }
    if let Some(k2) = usize_of(args.k2) {
        p.boundary_limit = k2;
    }
    p
}

fn empty_report(command: &'static str, n: usize, args: &RunArgs) -> Report {
    Report {
        command,
        status: String::new(),
        n,
        best_value: None,
        best_x: None,
        bound: None,
        rel_gap_percent: None,
        nodes: None,
        iterations: None,
        termination: None,
        u_hat: None,
        wall_time_s: 0.0,
        seed: args.seed,
        params: ReportParams {
            format: format_name(args.format),
            time_limit_s: None,
            node_limit: None,
            iters: None,
            k1: None,
            k2: None,
            root_iters: None,
            root_k1: None,
            warmstart: None,
            primal: None,
        },
    }
}

fn emit_line(err: &mut dyn Write, value: &impl Serialize) {
    if let Ok(line) = serde_json::to_string(value) {
        let _ = writeln!(err, "{line}");
    }
}

pub fn solve(args: &RunArgs, err: &mut dyn Write) -> Result<Report, CliError> {
    let p = read_problem(&args.input, args.format)?;
    let mut cfg = BnbConfig {
        node_params: apply_overrides(DescentParams::node(), args),
        time_limit: Some(Duration::from_secs_f64(args.time_limit)),
        node_limit: args.node_limit,
        injected_primal: args.primal,
        warmstart: !args.no_warmstart,
        seed: args.seed,
        ..BnbConfig::default()
    };
    if args.verbose > 0 {
        cfg.progress_every = if args.verbose >= 2 { 1 } else { 1000 };
    }
    let res = bnb::solve_with_progress(&p, &cfg, |prog| emit_line(err, prog))?;

    let mut report = empty_report("solve", p.n(), args);
    report.status = format!("{:?}", res.status);
    report.best_value = res.incumbent_value;
    report.best_x = res.incumbent_x.map(|x| x.bits().to_vec());
    report.bound = Some(res.global_bound);
    report.rel_gap_percent = Some(res.rel_gap_percent);
    report.nodes = Some(res.nodes);
    report.iterations = Some(res.descent_iterations);
    report.wall_time_s = res.wall_time.as_secs_f64();
    report.params = ReportParams {
        time_limit_s: Some(args.time_limit),
        node_limit: args.node_limit,
        iters: Some(cfg.node_params.max_iters),
        k1: Some(cfg.node_params.bisection_steps),
        k2: Some(cfg.node_params.boundary_limit),
        root_iters: Some(cfg.root_params.max_iters),
        root_k1: Some(cfg.root_params.bisection_steps),
        warmstart: Some(cfg.warmstart),
        primal: args.primal,
        ..report.params
    };
    Ok(report)
}

pub fn bound(args: &RunArgs, err: &mut dyn Write) -> Result<Report, CliError> {
    let started = Instant::now();
    let p = read_problem(&args.input, args.format)?;
    let mut params = apply_overrides(DescentParams::standalone(), args);
    params.record_trace = args.verbose > 0;
    let sys = LmiSystem::new(p.clone()).with_seed(args.seed);
    let start = sys.initial_feasible_point(&trivial_shift(&p, args.seed)?)?;
    let res = descend(&sys, start, &params)?;
    for rec in &res.trace {
        emit_line(err, rec);
    }

    let mut report = empty_report("bound", p.n(), args);
    report.status = "Bounded".into();
    report.bound = Some(res.bound + p.offset());
    report.iterations = Some(res.outer_iters as u64);
    report.termination = Some(format!("{:?}", res.termination));
    report.u_hat = Some(res.u_hat.iter().copied().collect());
    report.wall_time_s = started.elapsed().as_secs_f64();
    report.params.iters = Some(params.max_iters);
    report.params.k1 = Some(params.bisection_steps);
    report.params.k2 = Some(params.boundary_limit);
    Ok(report)
}

pub fn brute(args: &RunArgs) -> Result<Report, CliError> {
    let started = Instant::now();
    let p = read_problem(&args.input, args.format)?;
    if p.n() > BRUTE_MAX_N {
        return Err(CliError::input(format!("brute refuses n = {} > {BRUTE_MAX_N}", p.n())));
    }
    let (value, x) = brute_force(&p)?;
    let mut report = empty_report("brute", p.n(), args);
    report.status = "Optimal".into();
    report.best_value = Some(value);
    report.best_x = Some(x.bits().to_vec());
    report.bound = Some(value);
    report.rel_gap_percent = Some(0.0);
    report.wall_time_s = started.elapsed().as_secs_f64();
    Ok(report)
}

pub fn convert(args: &ConvertArgs) -> Result<String, CliError> {
    let p = read_problem(&args.input, args.format)?;
    Ok(io::write_triplet(&p)?)
}

/// Runs a parsed command line, writing results to `out` and logs to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let (report, json_out) = match &cli.command {
        Command::Solve(a) => (solve(a, err)?, &a.json_out),
        Command::Bound(a) => (bound(a, err)?, &a.json_out),
        Command::Brute(a) => (brute(a)?, &a.json_out),
        Command::Convert(a) => {
            let text = convert(a)?;
            match &a.output {
                Some(path) => fs::write(path, text)
                    .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?,
                None => out.write_all(text.as_bytes()).map_err(|e| CliError::input(e.to_string()))?,
            }
            return Ok(());
        }
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::numeric(e.to_string()))?;
    writeln!(out, "{json}").map_err(|e| CliError::input(e.to_string()))?;
    if let Some(path) = json_out {
        fs::write(path, format!("{json}\n"))
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
