use std::path::PathBuf;

use crate::metric::AxisymMetric;

/// Errors produced by the numerical core and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Non-finite values or curvature beyond the blowup threshold.
    #[error("flow blowup at t = {time}: {reason}")]
    Blowup {
        time: f64,
        reason: String,
        last_good: Option<Box<AxisymMetric>>,
    },

    #[error("cap area is not strictly increasing near psi = {psi}")]
    NonMonotoneArea { psi: f64 },

    #[error("ill-conditioned asymptotic fit: {0}")]
    IllConditionedFit(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
