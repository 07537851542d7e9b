use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid {nx}x{ny}: both axes need at least 3 nodes")]
    InvalidGrid { nx: usize, ny: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("{value} is outside the domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("PGM parse error at byte {offset}: {message}")]
    PgmParse { offset: usize, message: String },

    #[error("inconsistent topology cache: {0}")]
    Consistency(String),

    #[error("component {from} cannot reach component {to}")]
    Unreachable { from: usize, to: usize },

    #[error("unsupported terminal count {count} (at most {max})")]
    UnsupportedCardinality { count: usize, max: usize },

    #[error("flow diverged at step {step}: {reason}")]
    Divergence { step: usize, reason: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("missing required config key `{0}`")]
    MissingKey(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wraps an I/O error with the path it concerns.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
