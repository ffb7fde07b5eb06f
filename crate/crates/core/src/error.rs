use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid wiring, sizes, identifiers or configuration values.
    #[error("configuration error: {0}")]
    Config(String),

    /// An input whose required quantity is undefined, e.g. the norm of a zero vector.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The dense oracle refuses registers above its size limit.
    #[error("register of {n_qubits} qubits exceeds the oracle limit of {limit}")]
    SizeLimit { n_qubits: usize, limit: usize },

    /// NaN or infinity appeared in a loss, prediction or gradient.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Invalid feature values handed to a model.
    #[error("input error: {0}")]
    Input(String),

    /// Malformed dataset, history or checkpoint content.
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: msg.into(),
        }
    }
}
