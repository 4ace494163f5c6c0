use thiserror::Error;

use crate::wordmetric::BallTable;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("singular matrix")]
    Singular,

    #[error("not nilpotent: {0}")]
    NotNilpotent(String),

    #[error("group does not have polynomial growth: characteristic factor {factor} is not cyclotomic")]
    NotPolynomialGrowth { factor: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Ball enumeration ran out of budget. The table holds every radius that
    /// was completed before the budget was hit.
    #[error("element budget of {budget} exceeded after radius {completed_radius}")]
    BudgetExceeded {
        budget: usize,
        completed_radius: usize,
        partial: Box<BallTable>,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(#[from] crate::cli::descriptor::ParseError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
