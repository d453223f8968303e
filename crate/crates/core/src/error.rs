use thiserror::Error;

use crate::straighten::ReductionStats;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),
    #[error("invalid context limit: {0}")]
    BadLimit(&'static str),
    #[error("negative input {0}")]
    NegativeInput(i64),
    #[error("negative top argument {0} in exact binomial")]
    NegativeTop(i64),
    #[error("index overflow: {0}")]
    IndexOverflow(String),
    #[error("negative relation parameter n = {0}")]
    NegativeN(i64),
    #[error("epsilon must be 0 or 1, got {0}")]
    BadEpsilon(i64),
    #[error("expected a word of length 2, got length {0}")]
    WrongLength(usize),
    #[error("polynomial is not length-homogeneous")]
    Inhomogeneous,
    #[error("pair {0} is already admissible")]
    AlreadyAdmissible(String),
    #[error("fuel exhausted after {} rewrites ({} terms at peak)", .0.steps, .0.peak_terms)]
    FuelExhausted(ReductionStats),
    #[error("{word} lies outside the domain of {map}")]
    DomainViolation { map: String, word: String },
    #[error("{word} is not in {subspace}")]
    NotInSubspace { subspace: String, word: String },
    #[error("module action left {subspace}: produced {word}")]
    ClosureViolation { subspace: String, word: String },
    #[error("coefficient primes differ: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("syntax error at offset {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
