//! `isotune`: run, sweep and verify isotuned online learners.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

mod config;
mod run;
mod sweep;
mod verify;

use config::RunFlags;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{0}")]
    Violation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(e: impl ToString) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn from_harness(e: isotune_core::harness::HarnessError) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "isotune", version, about = "Scale-free online learners with checked regret certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one learner on one stream and write the per-round CSV.
    Run {
        #[command(flatten)]
        flags: RunFlags,
        /// CSV destination [default: stdout, summary then goes to stderr]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every point of a parameter grid, one CSV per point plus an index.
    Sweep {
        #[command(flatten)]
        flags: RunFlags,
        /// Grid axis `key=v1,v2,...`; keys: algo, stream, N, T, q, c, seed.
        /// Integer axes also take `lo..hi` (inclusive).
        #[arg(long = "grid")]
        grid: Vec<String>,
        /// Output directory
        #[arg(long = "out", default_value = "sweep")]
        out_dir: PathBuf,
        /// Worker threads
        #[arg(long, env = "ISOTUNE_THREADS")]
        threads: Option<usize>,
    },
    /// Run an invariant suite; exit 1 on any violation.
    Verify {
        #[command(subcommand)]
        suite: verify::Suite,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { flags, out } => run::cmd_run(&flags, out),
        Command::Sweep { flags, grid, out_dir, threads } => sweep::cmd_sweep(&flags, &grid, &out_dir, threads),
        Command::Verify { suite } => verify::cmd_verify(&suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("isotune: {e}");
            ExitCode::from(e.code())
        }
    }
}
