//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input vector, score vector, or name list has the wrong length.
    #[error("{context}: expected dimension {expected}, got {actual}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    /// A model violates a structural invariant (layer chaining, non-finite
    /// weights, missing identity output, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A configuration value is out of its documented range.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A weight file or dataset file could not be parsed. `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The declared class of an example does not match the model's argmax.
    #[error("example {id}: declared class {declared} does not match model prediction {predicted}")]
    LabelMismatch {
        id: String,
        declared: usize,
        predicted: usize,
    },

    /// The solver produced a non-finite gradient and cannot continue.
    #[error("solver aborted at iteration {iteration}: {message}")]
    SolverAbort { iteration: usize, message: String },

    /// An objective with gamma > 0 was evaluated without an autoencoder.
    #[error("gamma > 0 requires an autoencoder")]
    MissingAutoencoder,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset contains fewer than two classes")]
    SingleClass,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(context: impl Into<String>, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected,
            actual,
        }
    }
}
