//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Sym3Error {
    #[error("unit group of order {order} exceeds the enumeration cap {cap}")]
    EnumerationTooLarge { order: u64, cap: u64 },

    #[error("working level {level} too low; need at least {required}")]
    LevelTooLow { level: u32, required: u32 },

    #[error("insufficient p-adic precision: {0}")]
    InsufficientPrecision(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("invalid field specification: {0}")]
    BadField(String),

    #[error("descriptor invalid at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("descriptor is not p-minimal at p={p}: {message}")]
    NotMinimal { p: u64, message: String },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Sym3Error>;
