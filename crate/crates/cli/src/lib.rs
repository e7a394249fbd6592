//! Command-line front end: flag parsing, command dispatch and dataset output.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod validate;

use std::io::Write;

use clap::Parser;

pub use config::{Cli, RunConfig};
pub use dataset::{Cell, Dataset};
pub use error::CliError;

/// Environment variable capping the worker threads of parallel sweeps.
pub const THREADS_ENV: &str = "TDSIM_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::config(
            THREADS_ENV,
            format!("expected a positive integer, got {raw:?}"),
        )
    })?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Resolves the configuration of a parsed command line, drawing and
/// reporting a seed when a stochastic command has none.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let cfg = RunConfig::from_args(cli.command.kind(), cli.command.args())?;
    if cfg.is_stochastic() && cfg.seed.is_none() {
        let seed: u64 = rand::random();
        eprintln!("seed: {seed}");
        return Ok(cfg.with_seed(seed));
    }
    Ok(cfg)
}

fn run_parsed(cli: &Cli) -> Result<(), CliError> {
    init_threads()?;
    let cfg = resolve(cli)?;
    let data = commands::execute(&cfg)?;
    let text = data.render(cfg.format)?;
    match &cli.command.args().out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    match data.summary.get("failed") {
        Some(Cell::Int(n)) if *n > 0 => Err(CliError::ChecksFailed(*n as usize)),
        _ => Ok(()),
    }
}

/// Entry point shared by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_parsed(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("tdsim: {e}");
            e.exit_code()
        }
    }
}
