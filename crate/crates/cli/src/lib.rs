//! Command-line driver: resolves a [`config::RunConfig`], runs one experiment
//! and writes its tables as CSV + JSON.

pub mod config;
pub mod run;

pub use config::{Experiment, RunConfig};
pub use run::{run, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("{experiment} failed: {source}")]
    Experiment {
        experiment: Experiment,
        #[source]
        source: chirpaddr::Error,
    },
}

impl CliError {
    /// 2 for bad input, 1 for a failed computation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Validation { .. } => 2,
            CliError::Experiment { .. } => 1,
        }
    }
}
