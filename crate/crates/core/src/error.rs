//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// The variants map onto the CLI exit codes: configuration, input, format,
/// mismatch and metric errors are usage problems (exit 2); runtime and I/O
/// errors are execution failures (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad qubit counts, gate indices, hyperparameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid input data: dimension mismatches, empty batches, bad targets.
    #[error("input error: {0}")]
    Input(String),

    /// Malformed file contents (IDX, CSV).
    #[error("format error: {0}")]
    Format(String),

    /// Gradient vectors built from different models cannot be compared.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// A metric is undefined for the given inputs (constant targets, single class).
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    /// Numerical failure during execution (divergence, non-finite values).
    #[error("runtime error: {0}")]
    Runtime(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that indicate a bad request rather than an execution failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Input(_)
                | Error::Format(_)
                | Error::ModelMismatch(_)
                | Error::UndefinedMetric(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
