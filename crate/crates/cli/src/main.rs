mod fixtures;
mod report;
mod reproduce;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use edlm_mpc::control::PjmMode;
use edlm_mpc::sim::{run_closed_loop, Scenario};

use reproduce::Target;

#[derive(Parser)]
#[command(name = "edlm-mpc", version, about = "EDLM-based model predictive control: runs, reproduction, analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file; writes trace.csv and report.json.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the number of steps.
        #[arg(long)]
        steps: Option<usize>,
        /// Override the disturbance seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-run a bundled experiment and check it against its tolerances.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        /// Defaults to out/<target>.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Example 1 with Q weighting only the last predicted output.
        #[arg(long)]
        q_last: bool,
    },
    /// Stability and steady-state analysis at the scenario's initial point.
    Analyze { file: PathBuf },
}

fn load(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Shrinks the metric windows to fit a shortened run.
fn fit_metrics(s: &mut Scenario) {
    let n = s.steps;
    if s.metrics.window.is_some_and(|(_, hi)| hi > n) {
        eprintln!("note: metrics window dropped, run has only {n} steps");
        s.metrics.window = None;
    }
    if s.metrics.rms_after >= n {
        s.metrics.rms_after = 0;
    }
    if s.metrics.ed_after.is_some_and(|a| a.max(2) >= n) {
        s.metrics.ed_after = None;
    }
}

fn cmd_run(file: &Path, out: &Path, steps: Option<usize>, seed: Option<u64>) -> Result<bool> {
    let mut s = load(file)?;
    if let Some(n) = steps {
        s.steps = n;
        fit_metrics(&mut s);
    }
    if let Some(seed) = seed {
        s.seed = seed;
    }
    let trace = run_closed_loop(&s)?;
    let rep = report::run_report(&s, &trace)?;
    report::write_outputs(out, &trace, &rep)?;
    println!("wrote {} rows to {}", trace.len(), out.join("trace.csv").display());
    if let Some(e) = &rep.steady_error {
        println!("steady error: {e:?}");
    }
    println!("RMS e (k > {}): {:?}", rep.metrics.rms_after, rep.metrics.rms_error);
    Ok(true)
}

fn cmd_analyze(file: &Path) -> Result<bool> {
    let s = load(file)?;
    if s.controller.pjm_mode != PjmMode::Frozen {
        eprintln!("note: analysis holds the PJM at the initial point; the run itself uses fixed-point refinement");
    }
    let rep = report::analyze(&s, true)?;
    println!("{}", serde_json::to_string_pretty(&rep)?);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { file, out, steps, seed } => cmd_run(&file, &out, steps, seed),
        Command::Reproduce { target, out, q_last } => {
            let name = format!("{target:?}").to_lowercase();
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(name));
            reproduce::reproduce(target, &out, q_last)
        }
        Command::Analyze { file } => cmd_analyze(&file),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: tolerance check failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
