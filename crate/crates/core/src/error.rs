use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Fixing the last free variable would leave a zero-dimensional problem.
    #[error("fixing the only variable would produce an empty problem")]
    EmptyProblem,

    /// Cholesky hit a pivot at or below the positive-definiteness threshold.
    /// `pivot` is 0-based.
    #[error("matrix is not positive definite (pivot {pivot}, value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("eigenvalue iteration did not converge (estimate {estimate}, residual {residual:e})")]
    NoConvergence { estimate: f64, residual: f64 },

    /// The (1,1) entry of F^{-1} vanished, so no evaluation is possible.
    #[error("degenerate direction: first component of the kernel vector vanished ({z1:e})")]
    DegenerateDirection { z1: f64 },

    #[error("gradient direction vanished (norm {norm:e})")]
    StationaryPoint { norm: f64 },

    #[error("ray never leaves the feasible region (lambda_max = {lambda:e})")]
    UnboundedRay { lambda: f64 },

    #[error("shift does not make diag(u) - Q positive definite")]
    InfeasibleShift,

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}
