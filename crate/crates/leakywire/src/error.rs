use std::fmt;

/// Errors produced by the numerical modules and the CLI front end.
#[derive(Debug)]
pub enum Error {
    /// Quadrature failed to reach the requested tolerance.
    Quadrature(String),
    /// A parameter is outside its admissible range.
    InvalidParameter { name: String, message: String },
    /// An iterative eigensolver ran out of iterations; the payload carries
    /// condition diagnostics for the offending matrix.
    EigenFailure(String),
    /// A band-table invariant (sorting, symmetry, interlacing) was violated
    /// beyond tolerance, which usually signals an under-resolved basis.
    BandTableInvariant(String),
    /// The curvilinear metric 1 + u*gamma(s) degenerates on the grid.
    MetricDegenerate { halfwidth: f64, min_factor: f64 },
    /// A stated precondition does not hold; names the failing inequality.
    PreconditionFailed(String),
    /// Secular equation bracket contains no sign change.
    NoBracket(String),
    /// Configuration document rejected.
    Config(String),
    Io(std::io::Error),
    Json(serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Quadrature(msg) => write!(f, "quadrature failure: {msg}"),
            Error::InvalidParameter { name, message } => {
                write!(f, "invalid parameter `{name}`: {message}")
            }
            Error::EigenFailure(msg) => write!(f, "eigensolver failure: {msg}"),
            Error::BandTableInvariant(msg) => write!(f, "band table invariant violated: {msg}"),
            Error::MetricDegenerate {
                halfwidth,
                min_factor,
            } => write!(
                f,
                "metric factor 1+u*gamma degenerates for halfwidth a={halfwidth}: min = {min_factor}"
            ),
            Error::PreconditionFailed(ineq) => write!(f, "precondition failed: {ineq}"),
            Error::NoBracket(msg) => write!(f, "no sign change in secular bracket: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}
