use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("placement error: {0}")]
    Placement(String),

    #[error("distance undefined: node {from} cannot reach any of {targets:?}")]
    DistanceUndefined { from: usize, targets: Vec<usize> },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical range exceeded: {0}")]
    NumericalRange(String),

    #[error("Gramian is singular to working precision (pivot {pivot:e} at index {index}, tolerance {tolerance:e}); the (A, B) pair is uncontrollable")]
    SingularGramian {
        index: usize,
        pivot: f64,
        tolerance: f64,
    },

    #[error("configuration error: defender set {defenders:?} stayed uncontrollable over {attempts} noise draws")]
    RetriesExhausted { defenders: Vec<usize>, attempts: u16 },

    #[error("matrix is not diagonalizable to tolerance: {0}")]
    Diagonalizability(String),

    #[error("iteration failed to converge: {0}")]
    Convergence(String),

    #[error("system assembly: {0}")]
    Assembly(String),

    #[error("grid reduction: {0}")]
    Reduction(String),

    #[error("integration diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
