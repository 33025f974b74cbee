use thiserror::Error;

/// Errors raised by the protocol library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no multiplicative inverse modulo {modulus}")]
    ZeroInverse { modulus: u64 },

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("{0} is not an odd prime")]
    NotPrime(u64),

    #[error("expected {expected} items, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("difference {diff} is not in [1, {modulus})")]
    BadDifference { diff: u64, modulus: u64 },

    #[error("sets or progressions over different parameters cannot be combined")]
    MixedParameters,

    #[error("empty set")]
    EmptySet,

    #[error("parameters are in the trivial regime: {0}")]
    TrivialRegime(String),

    #[error("targets must be distinct")]
    EqualTargets,

    #[error("expected {expected} party messages, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("inputs sum to the target; the error is identically zero")]
    OnPromise,

    #[error("modulus is not square-free: factor {0} repeated")]
    NotSquareFree(u64),

    #[error("counterexample search needs distinct targets")]
    DegenerateTargets,

    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("malformed transcript: {0}")]
    MalformedTranscript(String),
}

pub type Result<T> = std::result::Result<T, Error>;
