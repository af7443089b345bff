use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid Orlicz function: {0}")]
    InvalidOrlicz(String),

    #[error("invalid majorant: {0}")]
    InvalidMajorant(String),

    #[error("frequency {k} exceeds the support bound {bound}")]
    SupportBound { k: i64, bound: i64 },

    #[error("aliasing: requested |k| <= {k} but the grid of {n} samples resolves only |k| < {}", n / 2)]
    Aliasing { k: usize, n: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("premise failed: {0}")]
    Premise(String),
}

pub type Result<T> = std::result::Result<T, Error>;
