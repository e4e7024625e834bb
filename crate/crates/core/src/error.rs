//! Error type shared by the analysis and simulation modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The unbounded-cutoff phase distribution diverges when `p + q <= 1`;
    /// the geometric ratio `(1 - p)/q` reaches 1 and the chain has no
    /// stationary distribution.
    #[error("phase distribution diverges: p + q <= 1 (p = {p}, q = {q})")]
    Singular { p: f64, q: f64 },

    /// A bracketing scan found no sign change.
    #[error("no root bracket found for {0}")]
    NoBracket(&'static str),

    /// Rejected configuration values.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
