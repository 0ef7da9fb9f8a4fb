use thiserror::Error;

use crate::phi::GpReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weight function: {0}")]
    InvalidPhi(String),
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("weight function is not in G_p for p = {}", .0.p)]
    NotGp(Box<GpReport>),
    #[error("weight function is constant at level {0}; no unique preimage")]
    NotInvertible(f64),
    #[error("level {0} lies below the infimum of the weight function")]
    BelowRange(f64),
    #[error("invalid integrability exponent p = {0}")]
    InvalidP(f64),
    #[error("invalid summability exponent q = {0}")]
    InvalidQ(String),
    #[error("invalid index exponent v = {0}")]
    InvalidV(String),
    #[error("sequence has {have} samples, {need} required")]
    TooFewSamples { have: usize, need: usize },
    #[error("invalid simple function: {0}")]
    InvalidFunction(String),
    #[error("operation requires {expected} cubes")]
    WrongMode { expected: &'static str },
    #[error("level data is not normalised: sum a^p |A| = {0}")]
    NotNormalized(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("space is not contained in L1_loc")]
    NotRegular,
    #[error("malformed coefficient index: {0}")]
    MalformedIndex(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
