use thiserror::Error;

use crate::field::FieldSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),

    #[error("modulus {0} is too large for machine-word arithmetic")]
    ModulusTooLarge(u64),

    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch {
        expected: FieldSpec,
        found: FieldSpec,
    },

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("matrix is singular")]
    Singular,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("direction matrices are linearly dependent (rank {rank} < {count})")]
    DependentDirections { rank: usize, count: usize },

    #[error("evaluation budget exceeded: {needed} evaluations needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("field too small: {0}")]
    FieldTooSmall(String),

    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
