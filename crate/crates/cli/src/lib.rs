//! Scenario runner behind the `fermient` binary.
//!
//! A run is described by a [`config::ScenarioConfig`], executed by
//! [`run::run_scenario`] and written as CSV or JSON by [`output`].

pub mod config;
pub mod output;
pub mod run;

use thiserror::Error;

pub use config::{emit_config, parse_config, ConfigError, ScenarioConfig};
pub use run::{run_scenario, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] fermient_core::Error),
    /// Unreadable or malformed auxiliary input.
    #[error("input error: {0}")]
    Input(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(fermient_core::Error::Resource(_)) => 3,
            CliError::Core(fermient_core::Error::Degenerate { .. }) => 4,
            _ => 1,
        }
    }
}
