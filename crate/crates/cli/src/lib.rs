//! Experiment driver: configuration, replica orchestration and output files.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod commands;
pub mod config;
pub mod harness;
pub mod output;
pub mod schedule;

pub use config::{ConfigError, Experiment, ExperimentConfig, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("all {0} replicas failed")]
    AllFailed(u64),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn csv(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::AllFailed(_) => 3,
            CliError::Io { .. } | CliError::Output(_) => 1,
        }
    }
}

/// What a finished subcommand hands back to `main`.
#[derive(Debug)]
pub struct Outcome {
    /// Printed to stdout.
    pub summary: serde_json::Value,
    /// Set when `--check` was requested and some check failed.
    pub check_failed: bool,
}

pub const EXIT_CHECK_FAILED: i32 = 4;
