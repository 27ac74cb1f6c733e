use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient ring error: {0}")]
    Ring(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("complex inconsistency: composite nonzero at ({row}, {col}) = {value}")]
    Inconsistent { row: usize, col: usize, value: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("capability missing: {0}")]
    Capability(String),

    #[error("degree {requested} outside truncation-safe window 0..={limit}")]
    Window { requested: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
