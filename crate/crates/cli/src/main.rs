//! Command-line entry point for the verification suite.
//!
//! Subcommands: `run` (matrix catalog + scalar checks + counterexample
//! search), `scalar` (scalar lemmas only), `counterexample` (search for the
//! known-to-fail bound's witness), `replay` (regenerate one recorded trial).
//!
//! Exit code is nonzero exactly when an applicable non-Remark check failed.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use matmean_core::catalog::MatrixCheckId;
use matmean_core::scalar::{
    check_derivative_formulas, check_scalar_lemma, default_derivative_grids, default_grids,
    search_remark_counterexample, ScalarLemmaId,
};
use matmean_core::suite::{
    default_v_grid, replay_with_spectrum, run_suite, ReportFormat, SuiteConfig, SuiteReport,
    DEFAULT_SEED, DEFAULT_TOL_REL, DEFAULT_TRIALS, REMARK_RESOLUTION, REMARK_V_RANGE,
    REMARK_X_RANGE, SCALAR_GRID,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "matmean", version, about = "Matrix-mean inequality verification suite")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full suite: matrix checks, scalar lemmas, counterexample search.
    Run(RunArgs),
    /// Run the scalar lemma grid checks and derivative cross-checks only.
    Scalar(ScalarArgs),
    /// Search for a violation of the weighted bound that fails.
    Counterexample(CexArgs),
    /// Regenerate one trial from its child seed and re-evaluate it.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum FormatArg {
    #[default]
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Trials per check, dimension, and weight grid point.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Matrix dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8])]
    dims: Vec<usize>,
    /// Weight grid, comma separated (default 0.1..0.9 step 0.1).
    #[arg(long = "v-grid", value_delimiter = ',')]
    v_grid: Option<Vec<f64>>,
    /// Master seed (MATMEAN_SEED overrides this default; the flag wins).
    #[arg(long, env = "MATMEAN_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Relative tolerance for margins, gaps, and residuals.
    #[arg(long, default_value_t = DEFAULT_TOL_REL)]
    tol: f64,
    /// Check ids to run (M_... and S_... tokens); default: all.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Report destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format for --out.
    #[arg(long, value_enum, default_value_t)]
    format: FormatArg,
    /// Eigenvalue range lo,hi for generated instances.
    #[arg(long, value_delimiter = ',')]
    spectrum: Option<Vec<f64>>,
}

#[derive(Args)]
struct ScalarArgs {
    /// x-grid size per regime.
    #[arg(long, default_value_t = SCALAR_GRID.0)]
    x_points: usize,
    /// v-grid size per regime.
    #[arg(long, default_value_t = SCALAR_GRID.1)]
    v_points: usize,
}

#[derive(Args)]
struct CexArgs {
    #[arg(long, default_value_t = REMARK_X_RANGE.0)]
    x_lo: f64,
    #[arg(long, default_value_t = REMARK_X_RANGE.1)]
    x_hi: f64,
    #[arg(long, default_value_t = REMARK_V_RANGE.0)]
    v_lo: f64,
    #[arg(long, default_value_t = REMARK_V_RANGE.1)]
    v_hi: f64,
    /// Grid resolution nx,nv.
    #[arg(long, value_delimiter = ',', default_values_t = [REMARK_RESOLUTION.0, REMARK_RESOLUTION.1])]
    resolution: Vec<usize>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Check id (M_... token).
    #[arg(long)]
    check: String,
    /// Child seed recorded in the report.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    dim: usize,
    /// Weight; defaults to 1/2 for weight-free checks.
    #[arg(long)]
    v: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL_REL)]
    tol: f64,
    /// Eigenvalue range lo,hi if the original run overrode it.
    #[arg(long, value_delimiter = ',')]
    spectrum: Option<Vec<f64>>,
}

fn parse_pair<T: Copy>(name: &str, values: &Option<Vec<T>>, default: (T, T)) -> Result<(T, T)> {
    match values {
        None => Ok(default),
        Some(v) if v.len() == 2 => Ok((v[0], v[1])),
        Some(v) => bail!("--{name} takes exactly two comma-separated values, got {}", v.len()),
    }
}

fn opt_fmt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into())
}

fn print_report(report: &SuiteReport) {
    println!(
        "{:<12} {:>7} {:>10} {:>8}  {:>11} {:>11} {:>11}",
        "check", "trials", "applicable", "failures", "min_margin", "min_sv_gap", "max_residual"
    );
    for m in &report.matrix_checks {
        println!(
            "{:<12} {:>7} {:>10} {:>8}  {:>11} {:>11} {:>11}",
            m.check_id.name(),
            m.trials,
            m.applicable,
            m.failures,
            opt_fmt(m.min_margin),
            opt_fmt(m.min_sv_gap),
            opt_fmt(m.max_residual),
        );
        if m.failures > 0 {
            println!(
                "             worst trial: seed={} dim={} v={}",
                m.worst_seed,
                m.worst_dim,
                m.worst_v.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
            );
        }
    }
    for s in &report.scalar_checks {
        println!(
            "{:<12} {:>7} {:>10} {:>8}  {:>11} {:>11} {:>11}",
            s.lemma_id.name(),
            s.points,
            s.points,
            s.violations,
            opt_fmt(s.worst_margin),
            "-",
            opt_fmt(s.max_residual),
        );
    }
    if let Some(c) = &report.counterexample {
        match &c.point {
            Some(p) => println!(
                "counterexample: x={:.6} v={:.6} lhs={:.6e} rhs={:.6e} gap={:.6e} persists_at_4x={}",
                p.x, p.v, p.lhs, p.rhs, p.gap, c.persists_at_4x
            ),
            None => println!("counterexample: none found in the search region"),
        }
    }
    println!(
        "total failures: {} (exit-relevant: {})",
        report.total_failures, report.non_remark_failures
    );
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let spectrum_range = parse_pair(
        "spectrum",
        &args.spectrum,
        matmean_core::instances::DEFAULT_SPECTRUM,
    )?;
    let config = SuiteConfig {
        trials: args.trials,
        dims: args.dims,
        v_grid: args.v_grid.unwrap_or_else(default_v_grid),
        tol_rel: args.tol,
        master_seed: args.seed,
        check_filter: args.checks,
        spectrum_range,
        out: args.out.clone(),
        format: args.format.into(),
    };
    let report = run_suite(&config).context("suite run failed")?;
    print_report(&report);
    if let Some(path) = &args.out {
        println!("report written to {}", path.display());
    }
    Ok(report.exit_ok())
}

fn cmd_scalar(args: ScalarArgs) -> Result<bool> {
    let mut ok = true;
    for id in ScalarLemmaId::ALL {
        if id == ScalarLemmaId::Remark {
            continue;
        }
        let mut points = 0;
        let mut violations = 0;
        let mut worst = f64::INFINITY;
        for grid in default_grids(id, args.x_points, args.v_points) {
            let r = check_scalar_lemma(id, &grid)?;
            points += r.points;
            violations += r.violations;
            if let Some(m) = r.worst_margin {
                worst = worst.min(m);
            }
            if let Some(res) = r.max_residual {
                worst = worst.min(-res);
            }
        }
        let mut line = format!(
            "{:<12} points={points:<7} violations={violations:<5} worst={worst:.3e}",
            id.name()
        );
        for grid in default_derivative_grids(id) {
            let d = check_derivative_formulas(id, &grid)?;
            line.push_str(&format!(
                " | fd: d1={:.2e} d2={:.2e} signs={} {}",
                d.max_d1_rel_err,
                d.max_d2_rel_err,
                d.sign_violations,
                if d.passed { "ok" } else { "FAIL" }
            ));
            ok &= d.passed;
        }
        println!("{line}");
        ok &= violations == 0;
    }
    Ok(ok)
}

fn cmd_counterexample(args: CexArgs) -> Result<bool> {
    let res = Some(args.resolution.clone());
    let resolution = parse_pair("resolution", &res, REMARK_RESOLUTION)?;
    let found = search_remark_counterexample(
        (args.x_lo, args.x_hi),
        (args.v_lo, args.v_hi),
        resolution,
    )?;
    match found {
        Some(p) => {
            let again = search_remark_counterexample(
                (args.x_lo, args.x_hi),
                (args.v_lo, args.v_hi),
                (resolution.0 * 4, resolution.1 * 4),
            )?;
            let persists = again.is_some();
            println!(
                "violation: x={:.12} v={:.12}\n  lhs={:.17e}\n  rhs={:.17e}\n  gap={:.17e}\n  persists at 4x resolution: {persists}",
                p.x, p.v, p.lhs, p.rhs, p.gap
            );
            Ok(persists)
        }
        None => {
            println!(
                "no violation found on [{}, {}] x [{}, {}] at {}x{}",
                args.x_lo, args.x_hi, args.v_lo, args.v_hi, resolution.0, resolution.1
            );
            Ok(false)
        }
    }
}

fn cmd_replay(args: ReplayArgs) -> Result<bool> {
    let Some(check) = MatrixCheckId::from_name(&args.check) else {
        bail!("unknown check id `{}`", args.check);
    };
    let spectrum = parse_pair(
        "spectrum",
        &args.spectrum,
        matmean_core::instances::DEFAULT_SPECTRUM,
    )?;
    let result = replay_with_spectrum(check, args.seed, args.dim, args.v, args.tol, spectrum)?;
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(result.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Scalar(args) => cmd_scalar(args),
        Cmd::Counterexample(args) => cmd_counterexample(args),
        Cmd::Replay(args) => cmd_replay(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
