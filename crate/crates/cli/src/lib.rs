//! Library surface of the benchmark orchestrator: configuration loading and
//! validation, the experiment runner, and the subcommand entry points. The
//! binary in `main.rs` is a thin argument-parsing shell over this.

pub mod backend_setup;
pub mod commands;
pub mod config;
pub mod runner;

pub use config::{validate_config, ExperimentConfig};
pub use runner::{run_experiment, run_prepared, PreparedExperiment, RunManifest, RunOutcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Configuration problems; every discovered issue is listed.
    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    /// Anything that aborts a run after validation passed.
    #[error("runtime failure: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }

    /// Process exit code: 1 for validation errors, 2 for runtime aborts.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
