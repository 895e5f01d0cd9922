use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point set must contain at least one point of dimension at least one")]
    EmptyPointSet,

    #[error("non-finite coordinate at point {point}, coordinate {coord}")]
    NonFinite { point: usize, coord: usize },

    #[error("covariance matrix is singular to tolerance")]
    SingularCovariance,

    #[error("zero-width slab constraints are mutually inconsistent")]
    InfeasibleDegenerate,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input too large for exhaustive enumeration: k = {k}, max = {max}")]
    TooLarge { k: usize, max: usize },

    #[error("subset intersection has {size} points, need at least {required}")]
    SmallIntersection { size: usize, required: usize },

    #[error("linear program failed: {0}")]
    Solver(String),
}

impl Error {
    /// Short stable identifier, used in output tables.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptyPointSet => "empty_point_set",
            Error::NonFinite { .. } => "non_finite",
            Error::SingularCovariance => "singular_covariance",
            Error::InfeasibleDegenerate => "infeasible_degenerate",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::TooLarge { .. } => "too_large",
            Error::SmallIntersection { .. } => "small_intersection",
            Error::Solver(_) => "solver",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
