use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not chordal")]
    NotChordal,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("{n} variables exceed the exact enumeration bound of {max}")]
    EnumerationBound { n: usize, max: usize },

    #[error("nonpositive factor value {0}")]
    NonPositiveFactor(f64),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("parameter-shift gradient unavailable: {0}")]
    ShiftIncompatible(String),

    #[error("structure does not match model kind {0}")]
    StructureMismatch(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {reason}")]
    MalformedFile { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
