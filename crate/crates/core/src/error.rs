use thiserror::Error;

/// Every failure surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("undefined valuation: input is zero")]
    UndefinedValuation,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("unsupported prime p={p}: {reason}")]
    UnsupportedPrime { p: u64, reason: String },
    #[error("no unit root: p={p} divides a_p={a_p} (non-ordinary)")]
    NonOrdinary { a_p: i64, p: u64 },
    #[error("{value} is divisible by p={p}")]
    DivisibleByP { value: String, p: u64 },
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("truncation too small: need T-degree at least {needed}, have {available}")]
    TruncationTooSmall { needed: usize, available: usize },
    #[error("incompatible operands: {0}")]
    Incompatible(String),
    #[error("singular model{}", label.as_ref().map(|l| format!(" ({l})")).unwrap_or_default())]
    SingularModel { label: Option<String> },
    #[error("bad reduction at {prime}: use Tate's algorithm for the local data")]
    BadReduction { prime: u64 },
    #[error("field size {q} exceeds the point-counting cap {cap}")]
    FieldTooLarge { q: u64, cap: u64 },
    #[error("manual review required: {0}")]
    ManualReview(String),
    #[error("wrong formula branch: {0}")]
    WrongBranch(String),
    #[error("not potentially multiplicative: valuation of j is {0} >= 0")]
    NotPotentiallyMultiplicative(i64),
    #[error("hypothesis violation (clause {clause}): {detail}")]
    HypothesisViolation { clause: u8, detail: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate curve label {0}")]
    DuplicateLabel(String),
    #[error("unknown curve label {0}")]
    UnknownLabel(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
