use thiserror::Error;

#[derive(Debug, Error)]
pub enum HolifdError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("local coordinate {0} outside [-1/2, 1/2]")]
    CoordinateOutOfRange(f64),

    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("time step {dt} exceeds stability cap {cap}")]
    Unstable { dt: f64, cap: f64 },

    #[error("solution blew up at t = {time}: {detail}")]
    BlowUp { time: f64, detail: String },

    #[error("projection did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64, last: Vec<f64> },

    #[error("derivation failed at order {order}: {constraint}")]
    Derivation { order: usize, constraint: String },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = HolifdError> = std::result::Result<T, E>;
