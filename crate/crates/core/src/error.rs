use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime (only prime base fields are supported)")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {q}^{n} is too large")]
    FieldTooLarge { q: u64, n: usize },
    #[error("value {value} is out of range for F_{q}")]
    OutOfRange { value: u64, q: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("linear system has no solution")]
    NoSolution,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("edge {0} has zero multiplicity")]
    ZeroMultiplicity(u32),
    #[error("W not full column rank (rank {rank}, {cols} columns)")]
    RankDeficientWiretap { rank: usize, cols: usize },
    #[error("unknown edge {0}")]
    UnknownEdge(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("edge {0} already reduced")]
    EdgeAlreadyReduced(u32),
    #[error("edge {0} fully absorbed by wiretapper")]
    EdgeAbsorbed(u32),
    #[error("instance is reducible; run the reduction first")]
    Reducible,
    #[error("no invertible certificate found after {0} attempts")]
    AttemptsExhausted(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("scheme invariant violated: {0}")]
    SchemeInvariant(String),
    #[error("simulation inconsistency: {0}")]
    Inconsistent(String),

    #[error("oracle budget exceeded: {points} points > 2^{log2_cap}")]
    OracleBudget { points: u128, log2_cap: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
