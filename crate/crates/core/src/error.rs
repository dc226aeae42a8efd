use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation error at line {line}: {msg}")]
    Validation { line: usize, msg: String },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("out of bounds: {0}")]
    Bounds(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("signal is not siftable (too few extrema)")]
    NotSiftable,

    #[error("signal is not decomposable at layer {layer}")]
    NotDecomposable { layer: usize },

    #[error("insufficient Holo-Hilbert depth: need {needed} AM layers, have {got}")]
    InsufficientDepth { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
