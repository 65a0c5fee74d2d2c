//! Command-line front end.
//!
//! Every command reads a [`RunConfig`], writes its report to the given
//! writer and returns an [`ExitStatus`]. Configuration problems surface as
//! [`CliError`] and map to exit code 1.

mod commands;
pub mod config;
mod sweep;

use std::path::PathBuf;

pub use commands::{
    calibrate_with, check_gradients_with, cmd_calibrate, cmd_check_gradients, cmd_simulate, cmd_solve,
    simulate_with, solve_with, GRADIENT_TOLERANCE,
};
pub use config::{CoefficientPreset, RunConfig, SEED_ENV};
pub use sweep::{cmd_sweep, format_g9, sweep_csv, sweep_rows, sweep_with, Axis, SweepRow, CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}: {message}")]
    Config { origin: String, message: String },
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl From<std::io::Error> for CliError {
    fn from(source: std::io::Error) -> Self {
        CliError::Io { path: PathBuf::from("<output>"), source }
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    /// The solver stopped without convergence, or a check failed.
    NotConverged,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::NotConverged => 2,
        }
    }
}

/// Process exit code for a command result: 0, 2, or 1 for any error.
pub fn exit_code(result: &Result<ExitStatus, CliError>) -> i32 {
    match result {
        Ok(status) => status.code(),
        Err(_) => 1,
    }
}

fn write_file(path: &std::path::Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
