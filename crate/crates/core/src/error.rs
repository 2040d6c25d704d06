use thiserror::Error;

/// Errors raised by the arithmetic layers and the claim checks built on them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("residues with different moduli ({left} vs {right}) cannot be combined")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: i128, modulus: u64 },

    #[error("Jacobi symbol needs a positive odd modulus, got {0}")]
    InvalidJacobiModulus(i64),

    #[error("{value} is divisible by {p}")]
    DivisibleByPrime { value: i128, p: u64 },

    #[error("zero has no unit part")]
    ZeroValue,

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("{p}^{exponent} does not fit in 63 bits")]
    ModulusOverflow { p: u64, exponent: u32 },

    #[error("p-adic operands disagree: (p={p1}, e={e1}) vs (p={p2}, e={e2})")]
    PrecisionMismatch { p1: u64, e1: u32, p2: u64, e2: u32 },

    #[error("precision exhausted: {needed} p-adic digits requested, only {available} known")]
    PrecisionExhausted { needed: i64, available: i64 },

    #[error("value has negative valuation {0} and has no residue")]
    NonIntegral(i64),

    #[error("{0}")]
    OutOfRange(String),

    #[error("hypothesis not met for {claim}: {condition}")]
    HypothesisNotMet {
        claim: &'static str,
        condition: &'static str,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
