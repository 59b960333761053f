use thiserror::Error;

/// Errors raised by the model, analysis and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate frequency: |omega + f| = {shift:e} is below the floor {floor:e}")]
    DegenerateFrequency { shift: f64, floor: f64 },

    #[error("convergence factor denominator vanishes (|d| = {modulus:e})")]
    DegenerateDenominator { modulus: f64 },

    #[error("asymptotic factor is unbounded for theta = 0")]
    ThetaZero,

    #[error("singular pivot at row {row} (|pivot| = {modulus:e})")]
    SingularPivot { row: usize, modulus: f64 },

    #[error("Picard iteration on the interface friction did not converge after {iterations} iterations (residual {residual:e})")]
    PicardNotConverged { iterations: usize, residual: f64 },

    #[error("equilibrium interface jump |U_a - U_o| = {jump:e} is too small to linearize the bulk formula")]
    ZeroJump { jump: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
