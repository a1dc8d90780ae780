use std::process::ExitCode;

use colest_core::estimators::EstimatorError;
use colest_core::fisher::{FisherError, PolicyError};
use colest_core::simulator::SimulationError;
use colest_core::strategy::StrategyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("missing required field `{0}`")]
    Missing(&'static str),
    #[error("degenerate problem: {0}")]
    Degenerate(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Missing(_) => ExitCode::from(2),
            CliError::Degenerate(_) => ExitCode::from(3),
            CliError::Io(_) | CliError::Csv(_) => ExitCode::from(1),
        }
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::SingularEverywhere => CliError::Degenerate(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<FisherError> for CliError {
    fn from(e: FisherError) -> Self {
        match e {
            FisherError::InsufficientSamples { .. } => CliError::Config(e.to_string()),
            _ => CliError::Degenerate(e.to_string()),
        }
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        CliError::Degenerate(e.to_string())
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::AllReplicationsExcluded(_) => CliError::Degenerate(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        CliError::Config(e.to_string())
    }
}
