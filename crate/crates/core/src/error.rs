use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("invalid exponential rate {0}")]
    InvalidRate(f64),

    #[error("invalid Bernoulli probability {numerator}/{denominator}")]
    InvalidProbability { numerator: f64, denominator: f64 },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("weight {weight} is outside the grid range [0, {max}]")]
    WeightOutOfRange { weight: f64, max: f64 },

    #[error("invalid signature size {0}")]
    InvalidSize(usize),

    #[error("leaf index {index} out of range for size {m}")]
    InvalidIndex { index: usize, m: usize },

    #[error("process over [{lower}, {upper}] cannot be split")]
    InvalidSplit { lower: u64, upper: u64 },

    #[error("signature has infinite components and cannot be reduced to b bits")]
    IncompleteSignature,

    #[error("incompatible signatures: {0}")]
    IncompatibleSignatures(String),

    #[error("invalid weight {weight} for element {element}")]
    InvalidWeight { element: u64, weight: f64 },

    #[error("duplicate element {0}")]
    DuplicateElement(u64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed signature: {0}")]
    Decode(String),
}
