use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time {time} does not fall on the sample grid")]
    OffGrid { time: f64 },

    #[error("initial state ({x}, {y}) lies on the singular set {{(0,0), (pi,0)}}")]
    SingularInitialState { x: f64, y: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bad field file {path:?}: {reason}")]
    FieldFormat { path: Option<PathBuf>, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
