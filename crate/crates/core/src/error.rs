use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid array: {0}")]
    InvalidArray(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("surface at ({x}, {y}) coincides with the target")]
    CoincidentWithTarget { x: f64, y: f64 },

    #[error("no fixed reflectivity value for candidate {0}")]
    MissingReflectivity(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown candidate index {0}")]
    UnknownCandidate(usize),

    #[error("candidate {0} is already selected")]
    AlreadySelected(usize),

    #[error("budget {budget} outside 1..={ground}")]
    BudgetOutOfRange { budget: usize, ground: usize },

    #[error("exhaustive search needs {subsets} subsets, cap is {cap}")]
    EnumerationCap { subsets: u128, cap: u128 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("curvature undefined: every singleton value is zero")]
    UndefinedCurvature,

    #[error("curvature {0} outside [0, 1]")]
    CurvatureOutOfRange(f64),
}

impl Error {
    /// Errors that indicate a numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NotPositiveDefinite { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::EnumerationCap { .. })
    }
}
