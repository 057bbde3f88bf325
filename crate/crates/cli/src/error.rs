//! Unified error type with the process exit-code policy: 0 success, 2 for
//! user or input problems, 3 for internal numeric failures.

use trendlens_core::bayes::BayesError;
use trendlens_core::corpus::CorpusError;
use trendlens_core::features::FeatureError;
use trendlens_core::graphx::GraphError;
use trendlens_core::mining::MiningError;
use trendlens_core::neural::NeuralError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad inputs, files, or flags: exit code 2.
    #[error("{0}")]
    Input(String),
    /// Internal numeric failure: exit code 3.
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Numeric(_) => EXIT_NUMERIC,
            _ => EXIT_INPUT,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

impl From<CorpusError> for Error {
    fn from(e: CorpusError) -> Self {
        Error::Input(e.to_string())
    }
}

impl From<MiningError> for Error {
    fn from(e: MiningError) -> Self {
        Error::Input(e.to_string())
    }
}

impl From<FeatureError> for Error {
    fn from(e: FeatureError) -> Self {
        Error::Input(e.to_string())
    }
}

impl From<GraphError> for Error {
    fn from(e: GraphError) -> Self {
        Error::Input(e.to_string())
    }
}

impl From<BayesError> for Error {
    fn from(e: BayesError) -> Self {
        match e {
            BayesError::NonFinite => Error::Numeric(e.to_string()),
            other => Error::Input(other.to_string()),
        }
    }
}

impl From<NeuralError> for Error {
    fn from(e: NeuralError) -> Self {
        match e {
            NeuralError::NonFiniteLoss { .. } => Error::Numeric(e.to_string()),
            other => Error::Input(other.to_string()),
        }
    }
}
