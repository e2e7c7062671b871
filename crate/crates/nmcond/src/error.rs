use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unequal lengths: {0} vs {1}")]
    UnequalLengths(usize, usize),
    #[error("range {start}..{end} out of bounds for length {len}")]
    OutOfRange { start: usize, end: usize, len: usize },
    #[error("field width {0} is outside the supported range 1..=16")]
    UnsupportedWidth(usize),
    #[error("field width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("output exceeds source length: {output} > {source_len}")]
    OutputExceedsSource { output: usize, source_len: usize },
    #[error("length {len} is not divisible by block width {width}")]
    Indivisible { len: usize, width: usize },
    #[error("domain mismatch: {0} vs {1} bits")]
    DomainMismatch(usize, usize),
    #[error("conditioning on a zero-probability value")]
    ZeroProbability,
    #[error("empty support")]
    EmptySupport,
    #[error("source has min-entropy below {required}: {detail}")]
    SourceBelowEntropy { required: u32, detail: String },
    #[error("adversary has a fixed point: A({0}) = {0}")]
    FixedPoint(String),
    #[error("profile violates {0}")]
    Profile(String),
    #[error("enumeration of {0} cases exceeds the exhaustive budget; use sampling mode")]
    TooLarge(String),
    #[error("insufficient local randomness: needed {needed} more bits")]
    Randomness { needed: usize },
    #[error("unrealizable schedule: {0}")]
    Schedule(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
