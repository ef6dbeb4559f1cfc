use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("subset is not invariant under the group: {0}")]
    NotInvariant(String),
    #[error("labeling is not a bijection onto 1..n: {0}")]
    NotABijection(String),
    #[error("encoding requires an ordered ground set")]
    UnorderedGroundSet,
    #[error("malformed encoding at byte {offset}: {message}")]
    Decode { offset: usize, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
