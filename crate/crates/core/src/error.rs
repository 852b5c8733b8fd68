use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the collocation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis size must be at least 1")]
    EmptyBasis,

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{0} is undefined at zero")]
    ZeroArgument(&'static str),

    #[error("foci must be distinct")]
    DegenerateFoci,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value of {what} at {at}")]
    NonFinite { what: String, at: Complex64 },

    #[error("image point {point} has elliptic radius {radius} > declared r = {declared}")]
    OutsideImageEllipse {
        point: Complex64,
        radius: f64,
        declared: f64,
    },

    #[error("no radius in the search grid yields a contraction")]
    NoContraction,

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("eigen index {index} out of range for {len} eigenvalues")]
    InvalidIndex { index: usize, len: usize },

    #[error("eigenfunctional cannot be normalised: h*(1) = {0}")]
    Normalization(Complex64),

    #[error("principal-branch logarithm invalid: {0}")]
    BranchViolation(String),

    #[error("leading eigenvalue is {found}, expected 1")]
    LeadingEigenvalue { found: Complex64 },

    #[error("ambiguous eigenvalue matching at n = {n}: candidates {first} and {second}")]
    AmbiguousMatch {
        n: usize,
        first: Complex64,
        second: Complex64,
    },
}

impl Error {
    /// True for errors caused by inputs that violate a stated precondition
    /// (as opposed to a numerical failure during the computation).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Normalization(_)
                | Error::LeadingEigenvalue { .. }
                | Error::AmbiguousMatch { .. }
                | Error::NoContraction
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(what: impl FnOnce() -> String, at: Complex64, value: Complex64) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what: what(), at })
    }
}
