use thiserror::Error;

pub type Result<T, E = FcabError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FcabError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {point:?} lies outside the unit cube")]
    OutsideUnitCube { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mean function `{kind}` is not defined in dimension {dim}")]
    UnsupportedDimension { kind: &'static str, dim: usize },

    #[error("invalid mean function: {0}")]
    InvalidMeanFunction(String),

    #[error("{bins}^{dim} bins overflow the bin index type")]
    PartitionOverflow { bins: usize, dim: u32 },

    #[error("budget {budget} is unreachable: only {reachable} arms lie in alive bins")]
    BudgetUnreachable { budget: usize, reachable: usize },

    #[error("trace has {got} pulls, expected {expected}")]
    TraceLength { expected: usize, got: usize },

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("lower-bound parameter window violated: {0}")]
    LowerBoundWindow(String),
}

impl FcabError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        FcabError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
