use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field is not enumerable: {0}")]
    NotEnumerable(String),
    #[error("cannot parse scalar {input:?}: {reason}")]
    ParseScalar { input: String, reason: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a subspace: {0}")]
    NotSubspace(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("Jacobi identity fails for basis triple ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("no embedding from {from} into {to}")]
    NoEmbedding { from: String, to: String },
    #[error("unknown catalog entry {0:?}")]
    UnknownCatalog(String),
    #[error("malformed input: {0}")]
    Input(String),
    #[error("not an ideal: bracket of {0} and {1} leaves the denominator")]
    NotIdeal(String, String),
    #[error("not closed under bracket: {0}")]
    NotClosed(String),
    #[error("point is not a witness: intersection did not shrink")]
    NotAWitness,
    #[error("scan budget exceeded: {points} points needed, budget {budget}")]
    BudgetExceeded { points: u128, budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
