use std::path::PathBuf;

use thiserror::Error;

use crate::quasi::CoefficientViolation;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Freud weight: {0}")]
    InvalidWeight(String),

    #[error("resolution m must be at least 1")]
    ZeroResolution,

    #[error("rho must lie in (0, 1), got {0}")]
    InvalidRho(f64),

    #[error("unsupported B-spline order {0}; expected one of 2, 4, 6, 8")]
    UnsupportedOrder(usize),

    #[error("derivative order {order} must be below the spline order {spline_order}")]
    DerivativeOrder { order: usize, spline_order: usize },

    #[error("interpolation nodes must be pairwise distinct; {0} appears twice")]
    DuplicateNode(f64),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("no catalog entry for ell = {0}; supply custom coefficients")]
    NoCatalogEntry(usize),

    #[error("invalid quasi-interpolation coefficients: {}", .0.first().map(ToString::to_string).unwrap_or_default())]
    InvalidCoefficients(Vec<CoefficientViolation>),

    #[error("evaluator failed at node x_{index} = {x}: {reason}")]
    Evaluator { index: i64, x: f64, reason: String },

    #[error("resolution m = {m} too small; this operator needs m >= {min}")]
    ResolutionTooSmall { m: usize, min: usize },

    #[error("integration did not converge on [{a}, {b}]; last estimates {previous} and {last}")]
    NonConvergence {
        a: f64,
        b: f64,
        previous: f64,
        last: f64,
    },

    #[error("derivative of order {0} is not available for this function")]
    MissingDerivative(usize),

    #[error("ratio undefined for the zero spline")]
    ZeroSpline,

    #[error("unsupported dimension d = {0}; expected 1, 2 or 3")]
    UnsupportedDimension(usize),

    #[error("sample budget n = {n} too small; need n >= {min}")]
    BudgetTooSmall { n: usize, min: usize },

    #[error("cannot place {needed} bumps away from the given points (only {available} free blocks)")]
    InfeasiblePlacement { needed: usize, available: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rate fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("non-positive error {error} at n = {n} (exact reproduction); no slope")]
    ExactReproduction { n: usize, error: f64 },

    #[error("unknown corpus function '{0}'")]
    UnknownFunction(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
