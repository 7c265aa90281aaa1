use thiserror::Error;

use crate::polyring::MultiPoly;

/// Errors raised by the toolkit. Each variant has a stable name (see [`Error::name`])
/// that the command line reports on its diagnostic stream.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("polynomials live in different variable spaces")]
    SpaceMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected {expected} values, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("polynomial is not w-homogeneous")]
    NotHomogeneous,
    #[error("the zero polynomial has no weight")]
    ZeroPolynomial,
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("invalid variable space: {0}")]
    BadSpace(String),
    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown built-in basis `{0}`")]
    UnknownBasis(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("invariant p{invariant} is not homogeneous of declared degree {declared}")]
    DegreeMismatch { invariant: usize, declared: u32 },
    #[error("degrees are not sorted non-increasingly")]
    DegreesNotSorted,
    #[error("last degree must be 2")]
    LastDegreeNotTwo,
    #[error("last invariant is not the squared norm")]
    LastInvariantNotNorm,
    #[error("generator {generator} is not orthogonal")]
    NotOrthogonal { generator: usize },
    #[error("invariant p{invariant} is not invariant under generator {generator}")]
    NotInvariant { generator: usize, invariant: usize },

    #[error("degree-{degree} component is not in the span of the basic invariants")]
    NotInvariantInSpan { degree: u32 },
    #[error("algebraic relation among the basic invariants at weight {degree}: {relation}")]
    RelationFound {
        degree: u32,
        relation: Box<MultiPoly>,
    },
    #[error("entry P[{a}][{b}] could not be rewritten: {cause}")]
    RewriteFailed {
        a: usize,
        b: usize,
        cause: Box<Error>,
    },

    #[error("invalid integrity basis transformation: {0}")]
    BadIbt(String),
    #[error("weight {weight} outside the admissible range [{low}, {high}]")]
    WeightOutOfBounds { weight: u32, low: u32, high: u32 },
    #[error("no active divisor of det(P) found at any admissible weight")]
    NothingActive,

    #[error("bad class parameters: {0}")]
    BadParameters(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("residual system outside the elimination solver: {0}")]
    Unsolved(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier of the error kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SpaceMismatch => "SpaceMismatch",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::NotHomogeneous => "NotHomogeneous",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::NotDivisible => "NotDivisible",
            Error::ZeroDivisor => "ZeroDivisor",
            Error::BadSpace(_) => "BadSpace",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotSymmetric => "NotSymmetric",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownBasis(_) => "UnknownBasis",
            Error::BadParameter(_) => "BadParameter",
            Error::DegreeMismatch { .. } => "DegreeMismatch",
            Error::DegreesNotSorted => "DegreesNotSorted",
            Error::LastDegreeNotTwo => "LastDegreeNotTwo",
            Error::LastInvariantNotNorm => "LastInvariantNotNorm",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::NotInvariant { .. } => "NotInvariant",
            Error::NotInvariantInSpan { .. } => "NotInvariantInSpan",
            Error::RelationFound { .. } => "RelationFound",
            Error::RewriteFailed { .. } => "RewriteFailed",
            Error::BadIbt(_) => "BadIbt",
            Error::WeightOutOfBounds { .. } => "WeightOutOfBounds",
            Error::NothingActive => "NothingActive",
            Error::BadParameters(_) => "BadParameters",
            Error::UnknownClass(_) => "UnknownClass",
            Error::Unsolved(_) => "Unsolved",
            Error::Io(_) => "IoError",
        }
    }

    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
