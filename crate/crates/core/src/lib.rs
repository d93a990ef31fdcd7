//! Counting rational points of bounded height on transcendental plane curves.
//!
//! The library certifies derivative-decay bounds for curve parametrizations,
//! computes fully explicit counting bounds, constructs the covering algebraic
//! curves interval by interval, and enumerates rational points empirically so
//! the observed counts can be compared against the theoretical bounds.

pub mod bezout;
pub mod bigfloat;
pub mod bound;
pub mod catalog;
pub mod covering;
pub mod expr;
pub mod slow;
pub mod jet;
pub mod points;
pub mod special;

use thiserror::Error as ThisError;

/// Library-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    /// Invalid user input (bad parameters, parse failures).
    #[error("input error: {0}")]
    Input(String),
    /// Evaluation outside a function's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The working precision cannot certify the requested comparison.
    #[error("precision escalation required: {0}")]
    Precision(String),
    /// A mathematical invariant that should hold was observed to fail.
    #[error("invariant violation: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 128;
