//! Subcommands and exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;
use uavmac::experiments::{
    benchmark_static_hover, benchmark_successive_hover, oracle_two_user_hfh, pareto_sweep, region_nesting_report,
    solve, BenchmarkPoint, Solution, StaticHover,
};
use uavmac::{RateProfile, Scheme};

use crate::config::{load_config, ConfigError, ScenarioConfig};
use crate::output::{
    fmt12, region_header, region_rows, sample_times, schedule_label, schedule_rows, to_json, trajectory_rows,
    write_csv, write_json, SolutionReport,
};

/// Thread count of the worker pool.
pub const THREADS_VAR: &str = "UAVMAC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "uavmac", version, about = "Rate regions of a UAV-enabled multiple-access channel")]
pub struct Cli {
    /// Scenario file (TOML).
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one boundary point and write solution.json, trajectory.csv and schedule.csv.
    Solve(Target),
    /// Boundary points over the configured profiles, one region CSV per scheme.
    Sweep(SchemeArg),
    /// Optimal value next to the successive-hover and static-hover benchmarks.
    Benchmark(Target),
    /// Two-user hover-fly-hover brute force; prints R.
    Oracle {
        /// Two-user mode; the only mode, kept explicit for scripts.
        #[arg(long)]
        k2: bool,
        #[command(flatten)]
        target: Target,
    },
    /// Region-level checks.
    Report {
        #[arg(value_enum)]
        kind: ReportKind,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportKind {
    /// `TDMA <= FDMA <= NOMA` on every configured profile.
    Nesting,
}

#[derive(Debug, Args)]
pub struct SchemeArg {
    /// noma, fdma or tdma; defaults to `[solver] scheme`, else all three.
    #[arg(long)]
    pub scheme: Option<Scheme>,
}

#[derive(Debug, Args)]
pub struct Target {
    #[command(flatten)]
    pub scheme: SchemeArg,
    /// Comma-separated rate profile; defaults to equal shares.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
}

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error("check failed: {0}")]
    Acceptance(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Usage(_) => 2,
            AppError::Solver(_) | AppError::Output { .. } => 3,
            AppError::Acceptance(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            AppError::Config(_) | AppError::Usage(_) => "config",
            AppError::Solver(_) | AppError::Output { .. } => "solver",
            AppError::Acceptance(_) => "acceptance",
        }
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() }
        })
    }
}

fn solver_err(e: uavmac::Error) -> AppError {
    AppError::Solver(e.to_string())
}

struct Context {
    cfg: ScenarioConfig,
    out: PathBuf,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, AppError> {
        let path = cli.config.as_ref().ok_or_else(|| AppError::Usage("--config is required".into()))?;
        let cfg = load_config(path)?;
        let out = cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        Ok(Self { cfg, out })
    }

    fn path(&self, name: &str) -> Result<PathBuf, AppError> {
        fs::create_dir_all(&self.out).map_err(|source| AppError::Output { path: self.out.clone(), source })?;
        Ok(self.out.join(name))
    }

    fn schemes(&self, arg: &SchemeArg) -> Vec<Scheme> {
        match arg.scheme.or(self.cfg.scheme) {
            Some(s) => vec![s],
            None => Scheme::ALL.to_vec(),
        }
    }

    fn one_scheme(&self, arg: &SchemeArg) -> Result<Scheme, AppError> {
        arg.scheme.or(self.cfg.scheme).ok_or_else(|| AppError::Usage("pass --scheme or set [solver] scheme".into()))
    }

    fn alpha(&self, target: &Target) -> Result<RateProfile, AppError> {
        let k = self.cfg.scenario.num_users();
        match &target.alpha {
            None => Ok(RateProfile::uniform(k)),
            Some(a) if a.len() != k => Err(AppError::Usage(format!("--alpha has {} entries for {k} users", a.len()))),
            Some(a) => RateProfile::new(a.clone()).map_err(|e| AppError::Usage(format!("--alpha: {e}"))),
        }
    }
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), AppError> {
    write_json(path, value).map_err(|source| AppError::Output { path: path.to_path_buf(), source })
}

fn write_csv_file(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<(), AppError> {
    write_csv(path, header, rows).map_err(|source| AppError::Output { path: path.to_path_buf(), source })
}

/// Configure the worker pool from the environment.
pub fn init_threads() -> Result<(), AppError> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| AppError::Usage(format!("{THREADS_VAR}={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::Usage(format!("{THREADS_VAR}: {e}")))
}

/// Run one command; the returned lines go to standard output.
pub fn run(cli: &Cli) -> Result<Vec<String>, AppError> {
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Solve(target) => run_solve(&ctx, target),
        Command::Sweep(arg) => run_sweep(&ctx, arg),
        Command::Benchmark(target) => run_benchmark(&ctx, target),
        Command::Oracle { k2, target } => run_oracle(&ctx, *k2, target),
        Command::Report { kind: ReportKind::Nesting } => run_nesting(&ctx),
    }
}

fn run_solve(ctx: &Context, target: &Target) -> Result<Vec<String>, AppError> {
    let scheme = ctx.one_scheme(&target.scheme)?;
    let alpha = ctx.alpha(target)?;
    let scn = &ctx.cfg.scenario;
    let sol = solve(scheme, &alpha, scn, &ctx.cfg.settings).map_err(solver_err)?;
    let validated = sol.recompute_rates(scn, ctx.cfg.settings.leg_panels).map_err(solver_err)?.profile_rate(&alpha);

    let shf = sol.trajectory();
    let report = SolutionReport {
        scheme: scheme.to_string(),
        alpha: &alpha,
        scenario: scn,
        rate: sol.sum_rate(),
        rates: &sol.rates().0,
        dual_value: sol.dual_value(),
        duality_gap: sol.duality_gap(),
        x_initial: shf.x_initial,
        x_final: shf.x_final,
        hover_points: &shf.hover_points,
        hover_durations: &shf.hover_durations,
        hover_count: sol.hover_count(),
        validated_rate: validated,
        detail: &sol,
    };
    write_json_file(&ctx.path("solution.json")?, &report)?;
    let times = sample_times(&sol, ctx.cfg.sample_step);
    write_csv_file(&ctx.path("trajectory.csv")?, &["t".into(), "x".into()], &trajectory_rows(&sol, &times))?;
    let label = schedule_label(&sol);
    let mut header = vec!["t".to_string()];
    header.extend((1..=scn.num_users()).map(|k| format!("{label}_{k}")));
    let rows = schedule_rows(&sol, scn, &times).map_err(solver_err)?;
    write_csv_file(&ctx.path("schedule.csv")?, &header, &rows)?;

    check_validation(&sol, validated, ctx.cfg.validation_tol)?;
    let summary = serde_json::json!({
        "scheme": scheme.to_string(),
        "R": to_json(&sol.sum_rate()),
        "duality_gap": to_json(&sol.duality_gap()),
        "hover_count": sol.hover_count(),
    });
    Ok(vec![summary.to_string()])
}

fn check_validation(sol: &Solution, validated: f64, tol: f64) -> Result<(), AppError> {
    let diff = (validated - sol.sum_rate()).abs();
    if diff > tol {
        return Err(AppError::Acceptance(format!(
            "re-evaluated rate {} differs from R = {} by {diff:e}",
            fmt12(validated),
            fmt12(sol.sum_rate())
        )));
    }
    Ok(())
}

fn run_sweep(ctx: &Context, arg: &SchemeArg) -> Result<Vec<String>, AppError> {
    let scn = &ctx.cfg.scenario;
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for scheme in ctx.schemes(arg) {
        let boundary = pareto_sweep(scheme, &ctx.cfg.profiles, scn, &ctx.cfg.settings);
        write_csv_file(
            &ctx.path(&format!("region_{scheme}.csv"))?,
            &region_header(scn.num_users()),
            &region_rows(&boundary),
        )?;
        write_json_file(&ctx.path(&format!("region_{scheme}.json"))?, &boundary)?;
        lines.push(format!("{scheme}: {} points, {} failures", boundary.points.len(), boundary.failures.len()));
        failed.extend(boundary.failures.iter().map(|f| format!("{scheme} {:?}: {}", f.alpha.as_slice(), f.error)));
    }
    if !failed.is_empty() {
        return Err(AppError::Solver(failed.join("; ")));
    }
    Ok(lines)
}

#[derive(Serialize)]
struct BenchmarkReport {
    scheme: String,
    alpha: RateProfile,
    optimal: f64,
    successive_hover: Result<BenchmarkPoint, String>,
    static_hover: StaticHover,
}

fn run_benchmark(ctx: &Context, target: &Target) -> Result<Vec<String>, AppError> {
    let alpha = ctx.alpha(target)?;
    let (scn, settings) = (&ctx.cfg.scenario, &ctx.cfg.settings);
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for scheme in ctx.schemes(&target.scheme) {
        let optimal = solve(scheme, &alpha, scn, settings).map_err(solver_err)?.sum_rate();
        let successive = match benchmark_successive_hover(scheme, &alpha, scn, settings) {
            Ok(b) => Ok(b),
            Err(e @ uavmac::Error::InfeasibleHorizon { .. }) => Err(e.to_string()),
            Err(e) => return Err(solver_err(e)),
        };
        let fixed = benchmark_static_hover(scheme, &alpha, scn, settings).map_err(solver_err)?;
        lines.push(format!(
            "{scheme}: optimal {} successive {} static {}",
            fmt12(optimal),
            successive.as_ref().map_or_else(|_| "infeasible".to_string(), |b| fmt12(b.rate)),
            fmt12(fixed.rate)
        ));
        reports.push(BenchmarkReport {
            scheme: scheme.to_string(),
            alpha: alpha.clone(),
            optimal,
            successive_hover: successive,
            static_hover: fixed,
        });
    }
    write_json_file(&ctx.path("benchmark.json")?, &reports)?;
    Ok(lines)
}

fn run_oracle(ctx: &Context, k2: bool, target: &Target) -> Result<Vec<String>, AppError> {
    let k = ctx.cfg.scenario.num_users();
    if k != 2 {
        return Err(AppError::Usage(format!("the oracle covers two users; the scenario has {k}")));
    }
    if !k2 {
        log::info!("two-user scenario; running the oracle without --k2");
    }
    let alpha = ctx.alpha(target)?;
    let schemes = ctx.schemes(&target.scheme);
    let mut results = Vec::new();
    for &scheme in &schemes {
        let r = oracle_two_user_hfh(scheme, &alpha, &ctx.cfg.scenario, &ctx.cfg.oracle).map_err(solver_err)?;
        results.push(serde_json::json!({ "scheme": scheme.to_string(), "alpha": alpha, "result": r }));
    }
    write_json_file(&ctx.path("oracle.json")?, &results)?;
    let rate = |v: &serde_json::Value| v["result"]["rate"].as_f64().expect("oracle rate is a number");
    Ok(if schemes.len() == 1 {
        vec![fmt12(rate(&results[0]))]
    } else {
        results.iter().map(|v| format!("{} {}", v["scheme"].as_str().unwrap_or_default(), fmt12(rate(v)))).collect()
    })
}

fn run_nesting(ctx: &Context) -> Result<Vec<String>, AppError> {
    let report = region_nesting_report(&ctx.cfg.profiles, &ctx.cfg.scenario, &ctx.cfg.settings, ctx.cfg.nesting_tol);
    write_json_file(&ctx.path("nesting.json")?, &report)?;
    if !report.failures.is_empty() {
        let msgs: Vec<String> = report.failures.iter().map(|f| format!("{:?}: {}", f.alpha.as_slice(), f.error)).collect();
        return Err(AppError::Solver(msgs.join("; ")));
    }
    let bad: Vec<String> = report.violations().map(|e| format!("{:?}", e.alpha.as_slice())).collect();
    if !bad.is_empty() {
        return Err(AppError::Acceptance(format!("nesting violated at {}", bad.join(", "))));
    }
    Ok(vec![format!("ordered: {} profiles", report.entries.len())])
}
