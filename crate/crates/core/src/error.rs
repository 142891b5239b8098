//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A function argument violated its preconditions.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data failed validation (ranges, dimensions, consistency).
    #[error("data validation failed: {0}")]
    DataValidation(String),

    /// A model could not be assembled from the given case.
    #[error("model build failed: {0}")]
    ModelBuild(String),

    /// The backend reported a non-optimal terminal status.
    #[error("solver failed on {context}: {detail}")]
    Solver { context: String, detail: String },

    /// The solver backend is missing or misconfigured.
    #[error("solver configuration: {0}")]
    Config(String),

    /// An optimal solution violated an internal audit; indicates a bug.
    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {detail}")]
    Csv { path: String, detail: String },

    #[error("config parse error on {path}: {detail}")]
    Toml { path: String, detail: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::DataValidation(msg.into())
    }
}
