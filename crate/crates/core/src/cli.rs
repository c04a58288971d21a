//! Command-line frontend.
//!
//! Exit codes: 0 on success, 2 for input or configuration errors, 3 when the
//! optimization itself fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::backtest::{self, BacktestReport, Trajectory};
use crate::config::{load_weights, BacktestData, RunConfig};
use crate::error::{Error, Result};
use crate::hyperplane::HyperplaneSet;
use crate::lp::{to_lp_text, SimplexSolver};
use crate::output::{format_number, to_json_string};
use crate::robust::{self, build_robust_lp, resolve_hyperplanes, Approximation};

#[derive(Debug, Parser)]
#[command(name = "robust-kelly", version, about = "Distributionally robust log-optimal portfolios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tangent lines of log(1 + x) with a guaranteed approximation error.
    Hyperplanes {
        #[arg(long, env = "ROBUST_KELLY_EPS", allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, env = "ROBUST_KELLY_XMIN", allow_negative_numbers = true)]
        xmin: f64,
        #[arg(long, env = "ROBUST_KELLY_XMAX", allow_negative_numbers = true)]
        xmax: f64,
        /// `z,a,b` CSV; a JSON summary is written next to it. Prints the CSV when omitted.
        #[arg(long, env = "ROBUST_KELLY_OUT")]
        out: Option<PathBuf>,
    },
    /// Solves the robust portfolio LP.
    Optimize {
        #[arg(long, env = "ROBUST_KELLY_CONFIG")]
        config: PathBuf,
        #[arg(long, env = "ROBUST_KELLY_OUT", default_value = "robust_solution.json")]
        out: PathBuf,
        /// Also write the LP in text form.
        #[arg(long, env = "ROBUST_KELLY_DUMP_LP")]
        dump_lp: Option<PathBuf>,
    },
    /// Simulates the account under fixed weights.
    Backtest {
        #[arg(long, env = "ROBUST_KELLY_CONFIG")]
        config: PathBuf,
        #[arg(long, env = "ROBUST_KELLY_WEIGHTS")]
        weights: PathBuf,
        #[arg(long, env = "ROBUST_KELLY_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
    /// Worst-case expected log-growth of fixed weights.
    WorstCase {
        #[arg(long, env = "ROBUST_KELLY_CONFIG")]
        config: PathBuf,
        #[arg(long, env = "ROBUST_KELLY_WEIGHTS")]
        weights: PathBuf,
    },
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn fmt_vec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format_number(*x)).collect();
    format!("[{}]", items.join(", "))
}

fn hyperplanes_csv(set: &HyperplaneSet) -> String {
    let mut out = String::from("z,a,b\n");
    for h in &set.planes {
        out.push_str(&format!("{},{},{}\n", format_number(h.z), format_number(h.a), format_number(h.b)));
    }
    out
}

fn cmd_hyperplanes(eps: f64, xmin: f64, xmax: f64, out: Option<&Path>) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if !(xmin > -1.0) {
        return Err(Error::InvalidInput("x_min must exceed -1".into()));
    }
    let set = HyperplaneSet::generate(xmin, xmax, eps)?;
    let csv = hyperplanes_csv(&set);
    match out {
        None => print!("{csv}"),
        Some(path) => {
            let summary = to_json_string(&json!({
                "epsilon": set.epsilon,
                "M": set.len(),
                "x_min": set.x_min,
                "x_max": set.x_max,
            }))?;
            write_file(path, &csv)?;
            write_file(&path.with_extension("json"), &summary)?;
            print!("{summary}");
        }
    }
    Ok(())
}

fn cmd_optimize(config: &Path, out: &Path, dump_lp: Option<&Path>) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    let scenarios = cfg.scenarios()?;
    let ambiguity = cfg.ambiguity(&scenarios)?;
    let cons = cfg.constraints(scenarios.n())?;
    let solver = SimplexSolver::default();
    let planes = resolve_hyperplanes(&solver, &scenarios, &cons, &cfg.approximation())?;
    if let Some(path) = dump_lp {
        write_file(path, &to_lp_text(&build_robust_lp(&scenarios, &ambiguity, &cons, &planes)?))?;
    }
    let sol = robust::solve_robust_with(&solver, &scenarios, &ambiguity, &cons, &Approximation::Explicit(planes))?;
    write_file(out, &to_json_string(&sol.to_json())?)?;
    println!("K_h = {}", fmt_vec(&sol.weights.k));
    println!("M = {}", sol.hyperplanes.len());
    println!("nominal ELG = {}", format_number(sol.nominal_elg));
    println!("worst-case ELG = {}", format_number(sol.worst_case_elg));
    println!("LP value = {}", format_number(sol.lp_value));
    Ok(())
}

fn run_segment(cfg: &RunConfig, path: &[Vec<f64>], weights: &crate::Weights) -> Result<(Trajectory, BacktestReport)> {
    let costs = cfg.costs(weights.len())?;
    let traj = backtest::run(path, weights, &costs, cfg.initial_wealth)?;
    let report = backtest::report(&traj, cfg.risk_free(path.len()))?;
    Ok((traj, report))
}

fn cmd_backtest(config: &Path, weights: &Path, out_dir: &Path) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    let weights = load_weights(weights)?;
    let report = match cfg.backtest_data()? {
        BacktestData::Full(path) => {
            let (traj, report) = run_segment(&cfg, &path, &weights)?;
            write_file(&out_dir.join("trajectory.csv"), &traj.to_csv())?;
            serde_json::to_value(report).expect("report serializes")
        }
        BacktestData::Split { in_sample, out_of_sample } => {
            let (t_in, r_in) = run_segment(&cfg, &in_sample, &weights)?;
            let (t_out, r_out) = run_segment(&cfg, &out_of_sample, &weights)?;
            write_file(&out_dir.join("trajectory_in_sample.csv"), &t_in.to_csv())?;
            write_file(&out_dir.join("trajectory_out_of_sample.csv"), &t_out.to_csv())?;
            json!({ "in_sample": r_in, "out_of_sample": r_out })
        }
    };
    let text = to_json_string(&report)?;
    write_file(&out_dir.join("report.json"), &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_worst_case(config: &Path, weights: &Path) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    let weights = load_weights(weights)?;
    let scenarios = cfg.scenarios()?;
    let ambiguity = cfg.ambiguity(&scenarios)?;
    let wc = robust::worst_case_elg(&scenarios, &ambiguity, &weights)?;
    print!("{}", to_json_string(&json!({ "value": wc.value, "p_star": wc.p_star }))?);
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Hyperplanes { eps, xmin, xmax, out } => cmd_hyperplanes(*eps, *xmin, *xmax, out.as_deref()),
        Command::Optimize { config, out, dump_lp } => cmd_optimize(config, out, dump_lp.as_deref()),
        Command::Backtest { config, weights, out_dir } => cmd_backtest(config, weights, out_dir),
        Command::WorstCase { config, weights } => cmd_worst_case(config, weights),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    if err.is_solver_failure() {
        3
    } else {
        2
    }
}

/// Parses `args` and runs the chosen command, reporting errors on stderr.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
