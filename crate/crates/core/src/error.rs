use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimensions must be positive (got {rows}x{cols})")]
    ZeroDimension { rows: usize, cols: usize },

    #[error("dimension mismatch: {what} expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("column {index} is numerically dependent on the current support (ratio {ratio:.3e})")]
    RankDeficient { index: usize, ratio: f64 },

    #[error("index {index} out of range for {len} columns")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("table row has {found} cells, schema `{schema}` expects {expected}")]
    RowArity {
        schema: String,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in column `{column}`")]
    NonFinite { column: String },

    #[error("experiment failed at m={m}, K={k}, case={case}: {source}")]
    Experiment {
        m: usize,
        k: usize,
        case: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
