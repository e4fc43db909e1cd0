use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max |h - h^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("invalid model parameters: {0}")]
    Params(String),

    #[error("mixing angle undefined: zero detuning and zero flip-flop coupling")]
    DegenerateAngle,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("integration failed at t = {t:.6e}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("integrity breach at t = {t:.6e}: {reason}")]
    Integrity { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
