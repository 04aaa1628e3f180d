use std::io;

use thiserror::Error;

/// Errors produced anywhere in the encode / simulate / decode chain.
#[derive(Debug, Error)]
pub enum Error {
    #[error("nibble value {0} does not fit in 4 bits")]
    InvalidNibble(u8),
    #[error("code value {0:#x} does not fit in 5 bits")]
    InvalidCode(u8),
    #[error("scrambler register must be a nonzero 11-bit value, got {0:#x}")]
    InvalidScramblerState(u16),
    #[error("input too short: need at least {need}, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("frame payload must not be empty")]
    EmptyFrame,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("constellation is degenerate: {0}")]
    DegenerateConstellation(String),
    #[error("symbol alignment undefined: labels are constant")]
    AlignmentUndefined,
    #[error("training set contains a single class")]
    SingleClass,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("scrambler recovery failed: {0}")]
    LfsrRecovery(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
