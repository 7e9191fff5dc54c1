use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}: manifold dimension must be at least 2")]
    InvalidDimension(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile evaluation produced a non-finite value at r = {r}")]
    ProfileEvaluation { r: f64 },

    #[error("rho = {0} is not positive; exponential volume growth is required")]
    NonPositiveRho(f64),

    #[error("step size underflow (stiffness) at r = {r}")]
    Stiffness { r: f64 },

    #[error("non-finite state during integration at r = {r}")]
    Propagation { r: f64 },

    #[error("spectral parameter {lambda} lies outside the admissible strip |Im| < {limit}")]
    StripViolation { lambda: Complex64, limit: f64 },

    #[error("degenerate c-function matching at lambda = {lambda}: {detail}")]
    DegenerateMatching { lambda: Complex64, detail: String },

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("spectral tail beyond the grid is too large (estimated deficit {deficit:e})")]
    Tail { deficit: f64 },

    #[error("symbol has a pole at lambda = {lambda}")]
    Pole { lambda: Complex64 },

    #[error("usage: {0}")]
    Usage(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used in CLI reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid_dimension",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ProfileEvaluation { .. } => "profile_evaluation",
            Error::NonPositiveRho(_) => "non_positive_rho",
            Error::Stiffness { .. } => "stiffness",
            Error::Propagation { .. } => "propagation",
            Error::StripViolation { .. } => "strip_violation",
            Error::DegenerateMatching { .. } => "degenerate_matching",
            Error::Truncation(_) => "truncation",
            Error::Tail { .. } => "tail",
            Error::Pole { .. } => "pole",
            Error::Usage(_) => "usage",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::Cache(_) => "cache",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Whether the error is a numerical flag rather than a usage problem.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ProfileEvaluation { .. }
                | Error::Stiffness { .. }
                | Error::Propagation { .. }
                | Error::StripViolation { .. }
                | Error::DegenerateMatching { .. }
                | Error::Truncation(_)
                | Error::Tail { .. }
                | Error::Pole { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
