use std::io;

use thiserror::Error;

/// Failure modes shared by every layer of the library.
///
/// Each variant maps onto one process exit code of the CLI, see [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("singularity of g(x) at x = {x_sing} lies inside the domain [{x_min}, {x_max}]")]
    Singularity { x_sing: f64, x_min: f64, x_max: f64 },

    #[error("invalid soliton parameter: {0}")]
    Parameter(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("numerical instability at t = {time}: {reason}")]
    Instability { time: f64, reason: String },

    #[error("center extraction failed: {0}")]
    Extraction(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// CLI exit code: 1 I/O, 2 configuration, 3 numerical failure, 4 singularity in domain.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Config(_) | Error::Parameter(_) => 2,
            Error::Instability { .. } | Error::Range(_) | Error::Extraction(_) => 3,
            Error::Singularity { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
