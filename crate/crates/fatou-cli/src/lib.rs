//! Command-line front end: configuration, JSON reports and images.

pub mod commands;
pub mod config;
pub mod json;
pub mod report;

pub use commands::{run, Command, Outcome};
pub use config::RunConfig;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("{0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 1 for failed checks and I/O, 2 for bad configuration, 3 for maps
    /// outside the perturbative regime.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) | CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Regime(_) => 3,
        }
    }
}

impl From<fatou::Error> for CliError {
    fn from(e: fatou::Error) -> Self {
        use fatou::Error as E;
        match e {
            E::RegimeViolation(s) => CliError::Regime(s),
            E::InvalidParams(_) | E::Unrealizable(_) => CliError::Config(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}
