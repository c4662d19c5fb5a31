//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (bad chart
    /// coordinates, negative lengths, unsupported dimension pairs, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its stated tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A field specification was rejected. For hyperbolic specs this carries
    /// the smallest admissible number of boundary waves.
    #[error("spec rejected: {reason} (minimal admissible n_waves: {min_n_waves})")]
    InsufficientWaves { reason: String, min_n_waves: usize },

    /// Invalid experiment or CLI configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
