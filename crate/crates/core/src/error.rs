use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {0} is outside the unit interval [0, 1]")]
    OutsideUnitInterval(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("block size {m} does not divide sample size {n}")]
    BlockSizeNotDivisor { n: usize, m: usize },

    #[error("divergence profile has {actual} entries, partition has {expected} blocks")]
    ProfileLength { expected: usize, actual: usize },

    #[error("lambda = {lambda} is outside the admissible range (0, {upper})")]
    LambdaOutOfRange { lambda: f64, upper: f64 },

    #[error(
        "MGF envelope {envelope} is only established at lambda' = m = {m}, got {lambda_prime}"
    )]
    EnvelopeUndefined {
        envelope: &'static str,
        m: usize,
        lambda_prime: f64,
    },

    #[error("exact enumeration is capped at m = {cap}, got {m}")]
    EnumerationCap { m: usize, cap: usize },

    #[error("sample value {value} is outside 1..={k}")]
    SampleOutOfRange { value: u64, k: u64 },

    #[error("expected {expected} sample values, got {actual}")]
    SampleLength { expected: usize, actual: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
