//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by grid construction, operator assembly, time stepping,
/// calibration and pricing.
#[derive(Debug, Error)]
pub enum SlvError {
    /// Input violates a precondition (bad bounds, counts, parameters).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A linear system factorization hit a zero pivot.
    #[error("singular system: {0}")]
    Singular(String),

    /// A fixed-point iteration exhausted its sweep budget.
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    /// The leverage fixed point could not be evaluated (nonpositive
    /// conditional expectation after fallback).
    #[error("calibration failed: {0}")]
    Calibration(String),

    /// An option price lies outside its no-arbitrage bounds.
    #[error("price out of bounds: {0}")]
    PriceOutOfBounds(String),

    /// Grid or time-step stamps of two artifacts disagree.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Dimensions of two arrays disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A file could not be parsed (CSV schema violations, ragged tensors).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SlvError>;
