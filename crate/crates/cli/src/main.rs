// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use pmme_cli::{commands, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "pmme", version, about = "Post-Markovian master equation solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral solution on the grid: trajectory.csv.
    Solve(Common),
    /// Choi-matrix margins on the grid: cp_scan.csv.
    CpScan(Common),
    /// Kraus operators at one time: kraus.txt.
    Kraus {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
    },
    /// Memory kernel from a trajectory CSV: kernel.ini.
    EstimateKernel {
        #[command(flatten)]
        common: Common,
        /// Trajectory in the format written by `solve`.
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Distances between spectral, integrated and Markovian solutions: compare.csv.
    Compare(Common),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("PMME_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("PMME_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot configure {threads} threads: {e}")))
}

fn run(command: Command) -> Result<commands::RunReport, CliError> {
    configure_threads()?;
    match command {
        Command::Solve(c) => commands::solve(&ScenarioConfig::load(&c.config)?, &c.out),
        Command::CpScan(c) => commands::cp_scan_cmd(&ScenarioConfig::load(&c.config)?, &c.out),
        Command::Kraus { common, t } => commands::kraus(&ScenarioConfig::load(&common.config)?, t, &common.out),
        Command::EstimateKernel { common, trajectory } => {
            commands::estimate_kernel(&ScenarioConfig::load(&common.config)?, &trajectory, &common.out)
        }
        Command::Compare(c) => commands::compare(&ScenarioConfig::load(&c.config)?, &c.out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    match run(cli.command) {
        Ok(report) => {
            print!("{report}");
            println!("wall time: {:.3} s", start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
