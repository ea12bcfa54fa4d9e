use thiserror::Error;

/// Errors produced by the variable-period routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("x = {x} is outside the phase domain [{start}, {end}]")]
    OutOfDomain { x: f64, start: f64, end: f64 },

    #[error("phase derivative is singular at x = {x}")]
    Singularity { x: f64 },

    #[error("phase is not strictly increasing: g'({x}) = {derivative}")]
    NonMonotone { x: f64, derivative: f64 },

    #[error("no preimage for y = {y}: phase range is [{lowest}, {highest}]")]
    NoPreimage { y: f64, lowest: f64, highest: f64 },

    #[error("backward period undefined at x = {x}")]
    BackwardUndefined { x: f64 },

    #[error("root finding did not converge: {0}")]
    Convergence(String),

    #[error("quadrature did not reach the requested accuracy: {0}")]
    Accuracy(String),

    #[error("basis functions do not share a phase")]
    IncompatibleBasis,

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of an iterative numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence(_) | Error::Accuracy(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
