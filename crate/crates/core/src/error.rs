use std::io;

use thiserror::Error;

use crate::family::Kind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("members {a} and {b} are tangent within tolerance")]
    Tangency { a: usize, b: usize },

    #[error("members {a} and {b} coincide within tolerance")]
    Coincident { a: usize, b: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("generation failed after {rounds} re-sampling rounds: {last}")]
    Generation { rounds: usize, last: String },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed family file: {0}")]
    Format(String),

    #[error("family is not in general position: {0}")]
    Validation(String),

    #[error("operation requires a {expected} family, got {found}")]
    Kind { expected: Kind, found: Kind },

    #[error("clique search exceeded its budget of {budget} nodes")]
    BudgetExceeded { budget: u64 },

    #[error("degenerate configuration: {0}")]
    Degeneracy(String),

    #[error("charging certificate failed: {0}")]
    CertificateFailure(String),
}

impl Error {
    pub(crate) fn kind(expected: Kind, found: Kind) -> Self {
        Error::Kind { expected, found }
    }
}
