//! `pmn`: run, sweep, generate and validate persistent monitoring scenarios.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pmn_core::controller::Weight;
use pmn_core::scenario::{Axis, Topology};
use pmn_core::sim::NoiseModel;

#[derive(Debug, Parser)]
#[command(name = "pmn", version, about = "Event-driven receding-horizon persistent monitoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a scenario and write its trace and result summary.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "PMN_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Simulate a scenario over a parameter grid and write a report.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary: H, alpha, beta or m.
        #[arg(long)]
        axis: Axis,
        /// Comma-separated grid values; `nominal` is allowed for alpha and beta.
        #[arg(long)]
        grid: String,
        /// Worker threads; all cores by default.
        #[arg(long)]
        parallel: Option<usize>,
        #[arg(long, env = "PMN_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Write a generated scenario with default parameters.
    Generate {
        topology: Topology,
        #[arg(long)]
        targets: usize,
        #[arg(long, default_value_t = 1)]
        agents: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario file and print a short summary.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

/// Scenario file plus overrides shared by `run` and `sweep`.
#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    controller: Option<String>,
    /// Planning horizon bound.
    #[arg(long = "H")]
    h: Option<f64>,
    #[arg(long)]
    alpha: Option<Weight>,
    #[arg(long)]
    beta: Option<Weight>,
    #[arg(long)]
    noise: Option<NoiseModel>,
    /// Noise magnitude.
    #[arg(long)]
    m: Option<f64>,
    /// Mean time between shocks.
    #[arg(long)]
    lambda: Option<f64>,
    /// Seeds as a list (`1,2,5`) or half-open range (`0..10`).
    #[arg(long)]
    seeds: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
