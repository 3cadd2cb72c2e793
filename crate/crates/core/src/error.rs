use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("covariance matrix is not positive definite (pivot {pivot}, value {value:e})")]
    NonPositiveDefinite { pivot: usize, value: f64 },

    #[error("shift by {tau} leaves the path support [{t0}, {t1}]")]
    OutOfWindow { tau: f64, t0: f64, t1: f64 },

    #[error("path is constant; Hölder exponent is undefined")]
    DegeneratePath,

    #[error("path support starts at {available}, but {required} is required")]
    InsufficientSupport { required: f64, available: f64 },

    #[error("Young integral needs alpha + beta > 1 (alpha = {alpha}, beta = {beta})")]
    RegularityViolation { alpha: f64, beta: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("step explosion at t = {t}: component magnitude {magnitude:e}")]
    StepExplosion { t: f64, magnitude: f64 },

    #[error("malformed path file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Components above this magnitude abort an integration.
pub const EXPLOSION_THRESHOLD: f64 = 1e12;

pub(crate) fn guard_state(t: f64, x: &[f64]) -> Result<()> {
    let magnitude = x.iter().fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) });
    if !(magnitude <= EXPLOSION_THRESHOLD) {
        return Err(Error::StepExplosion { t, magnitude });
    }
    Ok(())
}
