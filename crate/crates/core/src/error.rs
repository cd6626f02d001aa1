use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node count mismatch: {left} vs {right}")]
    NodeCountMismatch { left: usize, right: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid privacy parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A linear-domain quantity does not fit in an `f64`; use the log-domain variant.
    #[error("range error: {0}")]
    Range(String),

    #[error("enumerating graphs on {n} nodes exceeds the cap of {cap} nodes")]
    EnumerationCap { n: usize, cap: usize },

    #[error(
        "disconnected spectrum: eigenvalue {index} is {value:e}; the relative error metric \
         needs a connected graph (use the absolute error metric instead)"
    )]
    DisconnectedSpectrum { index: usize, value: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: edge list defines zero nodes")]
    EmptyGraph,

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
