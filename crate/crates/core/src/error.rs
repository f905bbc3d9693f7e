use thiserror::Error;

/// Errors raised by construction, evaluation and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    /// Two independent evaluation routes disagree beyond the allowed margin.
    #[error("construction check failed: {0}")]
    Construction(String),

    /// The point is too close to the singular set of the distance function.
    #[error("point lies within {distance:e} of the singular set (band {band:e})")]
    SingularSet { distance: f64, band: f64 },

    /// The warping gradient diverges on the boundary of the base.
    #[error("point lies on the boundary of the base, where the warping gradient diverges")]
    Boundary,

    /// A point (or its base projection) lies outside the closed base.
    #[error("point lies outside the base domain (signed distance {0:e})")]
    OutsideBase(f64),

    /// A shape, mode or parameter combination that the operation does not support.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative solver hit its iteration cap.
    #[error("iteration limit reached in {0}")]
    IterationLimit(&'static str),

    /// Malformed input data.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
