use num_bigint::{BigInt, BigUint};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("singular matrix")]
    SingularMatrix,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("subgroup levels differ: {left} vs {right}")]
    LevelMismatch { left: u64, right: u64 },
    #[error("invalid subgroup {0}")]
    InvalidSubgroup(String),
    #[error("kernels intersect nontrivially")]
    NontrivialIntersection,
    #[error("form ({a}, {b}, {c}) is not positive definite")]
    NotPositiveDefinite { a: BigInt, b: BigInt, c: BigInt },
    #[error("discriminant mismatch: {left} vs {right}")]
    DiscriminantMismatch { left: BigInt, right: BigInt },
    #[error("non-maximal order unsupported: {0} is not a fundamental discriminant")]
    NonMaximalOrder(BigInt),
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("p = {p} is not split in the field of discriminant {disc}")]
    PrimeNotSplit { p: BigUint, disc: BigInt },
    #[error("unsupported endomorphism center: {0}")]
    UnsupportedCenter(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("use kernel input for p-part (p = {0})")]
    PPartNeedsKernel(BigUint),
    #[error("ordinary curve has no α_p")]
    AlphaInOrdinary,
    #[error("kernel coprime part {coprime} is not an integer prime to p = {p}")]
    InvalidKernel { p: BigUint, coprime: String },
    #[error("subgroup orders differ: {left} vs {right}")]
    OrderMismatch { left: u64, right: u64 },
    #[error("derivation search failed: {0}")]
    DerivationSearch(String),
    #[error("certificate format: {0}")]
    Certificate(String),
}
