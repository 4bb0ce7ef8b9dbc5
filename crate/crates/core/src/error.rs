use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero argument: {0}")]
    ZeroArgument(&'static str),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rank {found} outside the allowed range {expected}")]
    Rank { found: usize, expected: &'static str },
    #[error("vector is not in the kernel of the member")]
    NotInKernel,
    #[error("degenerate output: {0}")]
    Degenerate(String),
    #[error("insufficient p-adic precision: {0}")]
    Precision(String),
    #[error("no change of basis made every leading minor nonvanishing on H")]
    MinorHypothesis,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("search exhausted: {0}")]
    NotFound(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
