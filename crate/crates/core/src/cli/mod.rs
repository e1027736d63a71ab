//! Scenario runner behind the `nlgauge` binary.
//!
//! Each subcommand reads a [`config::ScenarioConfig`], writes its CSV and
//! JSON files into the output directory, and returns the same data.
//! Failures map onto the process exit codes of [`CliError::exit_code`].

pub mod config;
pub mod output;
mod run;

pub use run::{
    convergence, gauge_check, mixture_demo, simulate, simulate_in_memory, sweep, ConvergenceReport,
    GaugeCheckReport, LevelDeviation, MixtureReport, SweepReport, SweepRow,
};

use crate::error::Error;

/// A subcommand failure, classified for the exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("threshold exceeded: {0}")]
    Threshold(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    /// 2 config, 3 numerical abort, 4 acceptance threshold, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Threshold(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => CliError::Config(e.to_string()),
            Error::Io(_) => CliError::Io(e.to_string()),
            Error::BlowUp { .. } | Error::StepTooLarge { .. } | Error::NonFinite(_) | Error::ZeroState => {
                CliError::Numerical(e.to_string())
            }
            // Everything else is a scenario the library refuses to set up.
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
