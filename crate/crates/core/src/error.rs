use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigensolver failed to converge (residual {residual:e})")]
    EigensolverFailed { residual: f64 },

    #[error("matrix dimension {dim} exceeds the eigensolver limit of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("no zeros in weak regime: λ/Γ = {ratio} (zeros exist only for λ/Γ < 2)")]
    NoZerosInWeakRegime { ratio: f64 },

    #[error("no initial entanglement: r = {r} does not exceed r* = {r_star}")]
    NoInitialEntanglement { r: f64, r_star: f64 },

    #[error("invalid bracket: {0}")]
    InvalidBracket(String),
}
