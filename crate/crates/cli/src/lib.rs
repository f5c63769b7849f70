//! `plap`: every command reads one TOML document and writes CSV tables plus
//! a TOML report into an output directory.
//!
//! Exit codes: 0 success (for `bounds`, conditions met), 1 invalid input,
//! 2 runtime abort, 3 checks failed.

pub mod checkpoint;
mod commands;
pub mod config;
pub mod csv;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::LoadedConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Invalid { .. } => 1,
            CliError::Io { .. } | CliError::Runtime(_) => 2,
        }
    }
}

/// How a command that ran to completion ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    ChecksFailed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::ChecksFailed => 3,
        }
    }

    fn from_pass(pass: bool) -> Status {
        if pass {
            Status::Success
        } else {
            Status::ChecksFailed
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "plap", version, about = "Stochastic p-Laplace runs with transport noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for ensembles; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides `[ensemble] seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constants and the decay conditions for the configured noise.
    Bounds(Paths),
    /// One path: energy CSV and a trajectory checkpoint.
    Simulate(Paths),
    /// Many paths: per-path and aggregate CSVs, interval labels, event table.
    Ensemble(Paths),
    /// Mild-form split per interval with its bounds.
    Mildcheck(Paths),
}

#[derive(Debug, Args)]
pub struct Paths {
    pub config: PathBuf,
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    let paths = match &cli.command {
        Command::Bounds(p) | Command::Simulate(p) | Command::Ensemble(p) | Command::Mildcheck(p) => p,
    };
    let cfg = LoadedConfig::read(&paths.config)?;
    let ctx = commands::Context { seed: cli.seed.unwrap_or_else(|| cfg.seed()), cfg: &cfg, out: &paths.out };
    let go = || match &cli.command {
        Command::Bounds(_) => commands::bounds(&ctx),
        Command::Simulate(_) => commands::simulate(&ctx),
        Command::Ensemble(_) => commands::ensemble(&ctx),
        Command::Mildcheck(_) => commands::mildcheck(&ctx),
    };
    match cli.threads {
        Some(0) => Err(CliError::Invalid { field: "--threads".into(), reason: "must be at least 1".into() }),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .install(go),
        None => go(),
    }
}
