use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("singular local mass matrix on {what} {index}")]
    DegenerateElement { what: &'static str, index: usize },

    #[error("step matrix factorization failed: {0}")]
    Factorization(String),

    #[error("nonpositive error value {0} passed to observed_order")]
    NonPositiveError(f64),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
