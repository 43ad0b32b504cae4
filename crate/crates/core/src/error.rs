use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped so callers (in particular the CLI) can map them to
/// exit codes: budget overruns are distinguishable from plain misuse.
#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u32),

    #[error("extension degree must be at least 1")]
    InvalidDegree,

    #[error("field size {q} exceeds the 2^16 cap")]
    FieldTooLarge { q: u64 },

    #[error("modulus must be monic of degree {expected}, got {got:?}")]
    BadModulus { expected: u32, got: Vec<u32> },

    #[error("modulus is reducible: divisible by {factor:?} (coefficients low to high)")]
    ReducibleModulus { factor: Vec<u32> },

    #[error("{0} is not an element of {1}")]
    NotAnElement(u32, String),

    #[error("elements belong to different fields")]
    MixedFields,

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("character sum requires a nonzero multiplier")]
    ZeroCharacterMultiplier,

    #[error("exhaustive {what} is infeasible: {size} exceeds budget {budget}")]
    Infeasible {
        what: &'static str,
        size: u128,
        budget: u128,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error("no nonzero codeword: the code is {{0}}")]
    ZeroCode,

    #[error("maximum-likelihood decoding failed: every codeword has likelihood zero")]
    Undecodable,

    #[error("malformed {what} file: {msg}")]
    Format { what: &'static str, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Conventional process exit code for this error.
    /// 2 = infeasible budget, 3 = usage or input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible { .. } => 2,
            _ => 3,
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
