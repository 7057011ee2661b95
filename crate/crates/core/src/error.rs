use thiserror::Error;

use crate::scalar::BaseRing;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("base ring mismatch: {0} vs {1}")]
    RingMismatch(BaseRing, BaseRing),
    #[error("truncated and untruncated elements cannot be combined")]
    ModeMismatch,
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("unknown base ring `{0}` (expected z, q or mod:<m>)")]
    UnknownRing(String),
    #[error("{0} is not invertible in {1}")]
    NotInvertible(String, BaseRing),
    #[error("2 is not invertible in {0}")]
    TwoNotInvertible(BaseRing),
    #[error("operation requires a field or the integers, got {0}")]
    UnsupportedRing(BaseRing),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("generator index {0} is outside the supported range")]
    UnsupportedGenerator(u32),
    #[error("arity {0} exceeds the resource guard of {1}")]
    ArityTooLarge(usize, usize),
    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("grade mismatch: {0}")]
    GradeMismatch(String),
    #[error("polynomial is not multilinear: {0}")]
    NotMultilinear(String),
    #[error("trace of a pure trace product is not supported: {0}")]
    PureTraceArgument(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
