//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A cavity index outside `1..=n_cavities` signals a caller bug.
    #[error("cavity index {index} out of range (system has {n_cavities} cavities)")]
    CavityIndexOutOfRange { index: usize, n_cavities: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid basis label: {0}")]
    InvalidLabel(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("design constraint violated: {0}")]
    Design(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
