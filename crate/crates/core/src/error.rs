use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} is not squarefree (divisible by {prime}^2)")]
    NotSquarefree { value: String, prime: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("input {0} is rational; a quadratic irrational is required")]
    RationalInput(String),

    #[error("word is not purely periodic")]
    NotPurelyPeriodic,

    #[error("periodic word {0} induces a quadratic with rational roots")]
    DegenerateWord(String),

    #[error("product of the deltas over one period is {product}, expected the unit {unit}")]
    UnitMismatch { product: String, unit: String },

    #[error("lattice is not a fractional ideal of the maximal order")]
    NotAnIdeal,

    #[error("b * [1, delta] is not the maximal order")]
    IncompatiblePair,

    #[error("delta = {0} violates delta > 2 and 0 < delta' < 1")]
    DeltaOutOfRange(String),

    #[error("N(b) = {norm} is not coprime to q = {q}")]
    IdealNotCoprime { norm: String, q: u64 },

    #[error("d = {d} exceeds the configured bound {bound}")]
    BoundExceeded { d: u64, bound: u64 },

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("bad character identifier {id:?}: {reason}")]
    BadCharacter { id: String, reason: String },

    #[error("continued fraction mismatch at n = {n}: expected {expected}, found {found}")]
    CfMismatch { n: i64, expected: String, found: String },

    #[error("norm residues N(b(C + D delta)) mod {q} vary with k for r = {r}")]
    HypothesisFailed { q: u64, r: u64 },

    #[error("no admissible n = {q}k + {r} found")]
    NoAdmissibleN { q: u64, r: u64 },

    #[error("need at least {needed} admissible samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("narrow class number of Q(sqrt({d})) is {h_plus}, the factorization oracle needs 1")]
    NarrowClassNotOne { d: u64, h_plus: u64 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquarefree { .. } => "NotSquarefree",
            Error::Invalid(_) => "ValidationError",
            Error::RationalInput(_) => "RationalInput",
            Error::NotPurelyPeriodic => "NotPurelyPeriodic",
            Error::DegenerateWord(_) => "DegenerateWord",
            Error::UnitMismatch { .. } => "UnitMismatch",
            Error::NotAnIdeal => "NotAnIdeal",
            Error::IncompatiblePair => "IncompatiblePair",
            Error::DeltaOutOfRange(_) => "DeltaOutOfRange",
            Error::IdealNotCoprime { .. } => "IdealNotCoprime",
            Error::BoundExceeded { .. } => "BoundExceeded",
            Error::NotFundamental(_) => "NotFundamental",
            Error::BadCharacter { .. } => "BadCharacter",
            Error::CfMismatch { .. } => "CFMismatch",
            Error::HypothesisFailed { .. } => "HypothesisFailed",
            Error::NoAdmissibleN { .. } => "NoAdmissibleN",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
            Error::NarrowClassNotOne { .. } => "NarrowClassNotOne",
            Error::Parse { .. } => "ParseError",
            Error::Internal(_) => "InternalError",
        }
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
