use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("not a unit vector: norm {norm}")]
    NotUnit { norm: f64 },

    #[error("point (a, b) = ({a}, {b}) lies outside the unit disk")]
    OutsideChart { a: f64, b: f64 },

    #[error("operation not supported for body `{0}`")]
    UnsupportedBody(String),

    #[error("direction lies within {margin:e} of a piece boundary")]
    OnPieceBoundary { margin: f64 },

    #[error("quadrature did not converge: best estimate {best} with error estimate {abs_error:e} after {evaluations} evaluations")]
    NoConvergence { best: f64, abs_error: f64, evaluations: usize },

    #[error("evaluation budget of {budget} exhausted (best estimate {best})")]
    BudgetExceeded { budget: usize, best: f64 },

    #[error("line-search minimizer stuck at the bracket edge t = {t}")]
    MinimizerAtBoundary { t: f64 },

    #[error("mesh is not watertight: {0}")]
    NotWatertight(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
