use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integration diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("radiation damping is not positive at Omega = {omega} (value {value})")]
    KernelValidity { omega: f64, value: f64 },

    #[error("not bi-stable: k1 = {k1} must exceed hydrostatic stiffness {k_hys}")]
    NotBistable { k1: f64, k_hys: f64 },

    #[error("requested order {order} exceeds numerical rank {rank}; singular values {singular_values:?}")]
    Truncation {
        order: usize,
        rank: usize,
        singular_values: Vec<f64>,
    },

    #[error("matrix logarithm undefined: eigenvalue {re} + {im}i lies on the negative real axis")]
    LogBranch { re: f64, im: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("zero wave amplitude")]
    ZeroAmplitude,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. }
                | Error::KernelValidity { .. }
                | Error::Truncation { .. }
                | Error::LogBranch { .. }
                | Error::Singular
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
