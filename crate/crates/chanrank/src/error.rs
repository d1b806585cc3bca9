//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by curve evaluation, ranking, simulation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value lies outside the mathematical domain of an operation
    /// (non-finite SNR, occupancy outside [0, 1], negative energy, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration or parameter violates its invariants
    /// (non-positive steepness, empty grid, invalid duty cycle, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An operation that requires at least one element received none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Malformed text input; `line` is 1-based (0 when unknown).
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// A reference ranking names observations that do not exist.
    #[error("inconsistent reference ranking: {0}")]
    Consistency(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
