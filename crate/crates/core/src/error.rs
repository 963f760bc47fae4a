use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("density has a negative or non-finite value {value} at cell {index}")]
    NegativeDensity { index: usize, value: f64 },

    #[error("density mass {mass} is not within {tolerance} of one")]
    MassNotNormalized { mass: f64, tolerance: f64 },

    #[error("cumulative curve is not a distribution function: {0}")]
    InvalidCdf(String),

    #[error("grid window clips {clipped:e} of mass (tolerance {tolerance:e})")]
    TailMassTooLarge { clipped: f64, tolerance: f64 },

    #[error("moment of order {order} diverges (finite only below {limit})")]
    MomentDiverges { order: f64, limit: f64 },

    #[error("point masses cannot be rasterized onto a grid")]
    PointMassNotRasterizable,

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("alpha = {0} is outside (0, 2)")]
    AlphaOutOfRange(f64),

    #[error("negative-order distance needs n - 2 + alpha > 0 (n = {n}, alpha = {alpha})")]
    OrderNotAdmissible { n: usize, alpha: f64 },

    #[error("operands must carry equal mass ({left} vs {right})")]
    UnequalMass { left: f64, right: f64 },

    #[error("Gini index needs a positive mean, found {0}")]
    NonPositiveMean(f64),

    #[error("Gini index needs nonnegative support, found a point at {0}")]
    NegativeSupport(f64),

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    StabilityViolation { dt: f64, limit: f64 },

    #[error("density dropped to {min:e}, below the positivity tolerance")]
    NegativeDensityBeyondTolerance { min: f64 },

    #[error("rate fit needs at least {required} usable points, found {found}")]
    InsufficientPoints { found: usize, required: usize },

    #[error("prediction is incompatible with the trace: {0}")]
    IncompatiblePrediction(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

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

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
