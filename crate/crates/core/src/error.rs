use thiserror::Error;

/// Errors raised by the arithmetic, descent and certificate layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero input where a nonzero value is required")]
    Zero,
    #[error("factorization of {0} exceeds the configured bound")]
    BoundExceeded(String),
    #[error("{0} is not prime")]
    NonPrime(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("curve roots must be pairwise distinct")]
    DegenerateCurve,
    #[error("point ({0}, {1}) is not on the curve")]
    PointNotOnCurve(String, String),
    #[error("precision exhausted at {place}: undecided residue {residue} mod {modulus}")]
    PrecisionExhausted {
        place: String,
        residue: String,
        modulus: String,
    },
    #[error("conductor unavailable: {0}")]
    ConductorUnavailable(String),
    #[error("no witness class: {0}")]
    NoWitnessClass(String),
    #[error("prime {0} is excluded for this operation")]
    ExcludedPrime(u64),
    #[error("family (p={p}, q={q}) is not admissible")]
    Inadmissible { p: u64, q: u64 },
    #[error("pigeonhole self-test failed at r = {0}")]
    InternalPigeonholeViolation(u64),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
