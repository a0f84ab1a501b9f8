use alloc::string::String;
use core::fmt;

/// Every failure mode of the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Metric matrix is not symmetric positive definite at the point.
    SingularMetric,
    /// Point lies outside the chart's coordinate box.
    OutOfDomain,
    /// Jacobi sweeps hit the iteration cap.
    EigenFailure,
    NoComplexStructure,
    /// J-symmetrized spectrum does not come in pairs.
    MultiplicityMismatch { gap: f64 },
    BadRegimeParams(String),
    /// Warped-profile integration failed its Richardson check or lost positivity.
    OdeInaccurate { detail: String },
    DegreeExceedsDimension { degree: usize, dim: usize },
    JetUnavailable,
    NonMetricConnection { defect: f64 },
    EmptySample,
    HypothesisViolated(String),
    BadBounds,
    LevelSetTouchesBoundary,
    NonRegularValue,
    NotStarShaped,
    DegenerateImmersion,
    BasePointCoincides,
    WindowTooSmall,
    NotKahlerCatalog,
    DimensionMismatch { expected: usize, found: usize },
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularMetric => write!(f, "metric is not positive definite"),
            Error::OutOfDomain => write!(f, "point outside chart domain"),
            Error::EigenFailure => write!(f, "Jacobi eigen-iteration did not converge"),
            Error::NoComplexStructure => write!(f, "chart carries no complex structure"),
            Error::MultiplicityMismatch { gap } => {
                write!(f, "complex Hessian eigenvalues not paired (gap {gap:e})")
            }
            Error::BadRegimeParams(msg) => write!(f, "bad curvature regime parameters: {msg}"),
            Error::OdeInaccurate { detail } => write!(f, "warp ODE integration failed: {detail}"),
            Error::DegreeExceedsDimension { degree, dim } => {
                write!(f, "form degree {degree} exceeds dimension {dim}")
            }
            Error::JetUnavailable => write!(f, "derivative jet unavailable"),
            Error::NonMetricConnection { defect } => {
                write!(f, "connection is not metric (antisymmetry defect {defect:e})")
            }
            Error::EmptySample => write!(f, "sample is empty after filtering"),
            Error::HypothesisViolated(msg) => write!(f, "hypothesis violated: {msg}"),
            Error::BadBounds => write!(f, "lower bound exceeds upper bound"),
            Error::LevelSetTouchesBoundary => write!(f, "sublevel set reaches the domain boundary"),
            Error::NonRegularValue => write!(f, "level is not a regular value"),
            Error::NotStarShaped => write!(f, "sublevel set is not star-shaped about the center"),
            Error::DegenerateImmersion => write!(f, "immersion differential is degenerate"),
            Error::BasePointCoincides => write!(f, "point coincides with the base point"),
            Error::WindowTooSmall => write!(f, "extrinsic ball leaves the parameter window"),
            Error::NotKahlerCatalog => write!(f, "immersion is not a Kähler catalog entry"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
