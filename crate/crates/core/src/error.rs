use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial has no coefficients")]
    EmptyPolynomial,

    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,

    #[error("constant coefficient is zero; deflate the zero roots first")]
    ZeroConstantCoefficient,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("root set contains a zero entry at index {0}")]
    ZeroRoot(usize),

    #[error("division by zero in extended precision")]
    SingularDivision,

    #[error("derivative vanishes at {at}")]
    SingularDerivative { at: Complex64 },

    #[error("witness construction failed: {0}")]
    WitnessDegenerate(&'static str),

    #[error("root finder did not converge after {iterations} iterations ({restarts} restarts)")]
    RootfindFailed {
        iterations: usize,
        restarts: usize,
        best: Vec<Complex64>,
        residuals: Vec<f64>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// True for failures that come from the numerics rather than from the
    /// shape of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularDivision
                | Error::SingularDerivative { .. }
                | Error::WitnessDegenerate(_)
                | Error::RootfindFailed { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
