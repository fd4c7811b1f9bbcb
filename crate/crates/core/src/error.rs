use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite value after step at t = {t}: {detail}")]
    NonFinite { t: f64, detail: String },
    #[error("tower not converged: max |d_s u| = {residual:e} at s = {s_max} (tail tolerance {tol:e})")]
    TowerNotConverged { s_max: f64, residual: f64, tol: f64 },
    #[error("frame transport step too large: norm drift {drift:e} at checkpoint {checkpoint}")]
    TransportStep { checkpoint: usize, drift: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
