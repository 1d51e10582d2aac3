use thiserror::Error;

/// Errors surfaced by the library.
///
/// Hypothesis shortfalls (small `p`, rank below a stated threshold) are
/// deliberately *not* errors: computations proceed and the caller receives
/// the weaker guarantee through report fields instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} out of supported range (2 < p < 2^31)")]
    PrimeOutOfRange(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("enumeration budget exceeded: needs {required} points, budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("empty Gowers set: {0}")]
    EmptyDomain(String),
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed data: {0}")]
    MalformedData(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
