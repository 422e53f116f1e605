use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A factorization or solve failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The deterministic-equivalent iteration hit its cap.
    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// Configuration or experiment spec failed validation; one entry per violated field.
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// A numerical failure at a specific sweep point of an experiment.
    #[error("at {axis} = {value}: {source}")]
    SweepPoint {
        axis: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for failures rooted in validation or parsing rather than numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Validation(_) | Error::Parse(_) | Error::Domain(_) => true,
            Error::SweepPoint { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
