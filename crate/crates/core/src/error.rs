use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in F_{p}")]
    DivisionByZero { p: u32 },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("arity mismatch: {left} vs {right} variables")]
    ArityMismatch { left: usize, right: usize },
    #[error("invalid modulus {0}: expected an odd prime")]
    InvalidModulus(u32),
    #[error("index {index} out of range for {len} variables")]
    IndexError { index: usize, len: usize },
    #[error("substitution image for x_{index} has a nonzero constant term")]
    RelationViolation { index: usize },
    #[error("form degree {0} exceeds the number of variables {1}")]
    DegreeError(usize, usize),
    #[error("parity error: {0}")]
    ParityError(String),
    #[error("unsupported: {0}")]
    UnsupportedKind(String),
    #[error("contact identification failed: {0}")]
    ContactNormalizationError(String),
    #[error("verification failed in {context}: {detail}")]
    VerificationFailure { context: String, detail: String },
    #[error("linear form does not vanish on the derived subalgebra")]
    InvalidForm,
    #[error("subspace is not closed: {0}")]
    ClosureError(String),
    #[error("action is not semisimple: weight spaces span {found} of {expected} dimensions")]
    NotSemisimple { found: usize, expected: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("parameters outside the supported envelope: {0}")]
    EnvelopeError(String),
    #[error("element lies outside the chart of the alternating form")]
    OutsideOmegaBeta,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    pub(crate) fn verification(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::VerificationFailure { context: context.into(), detail: detail.into() }
    }
}
