use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum LerayError {
    #[error("beta must satisfy 0 <= beta < 1, got {0}")]
    BetaOutOfRange(f64),

    #[error("point is not on the surface: residual {residual:e} exceeds tolerance {tolerance:e}")]
    SurfaceMembership { residual: f64, tolerance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular kernel: {0}")]
    Singular(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("singular dual-coordinate system: determinant {det:e} below threshold {threshold:e}")]
    SingularSystem { det: f64, threshold: f64 },

    #[error("dual point maps to projective infinity: |(1,w)Y0| = {0:e}")]
    ProjectiveInfinity(f64),

    #[error("degenerate chart: {0}")]
    Chart(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LerayError>;
