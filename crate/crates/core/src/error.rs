use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock cutoff must keep at least 2 levels, got {0}")]
    InvalidCutoff(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Hilbert-space dimension {dim} exceeds the guard of {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("post-selection of qubit {qubit} succeeded with probability {probability:.3e} (floor {floor:.1e})")]
    PostselectionFloor {
        qubit: usize,
        probability: f64,
        floor: f64,
    },

    #[error("state norm vanished")]
    VanishingNorm,

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("circuit text line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::PostselectionFloor { .. }
                | Error::VanishingNorm
                | Error::NoConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
