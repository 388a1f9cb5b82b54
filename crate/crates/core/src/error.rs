use thiserror::Error;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Physically meaningless or out-of-regime parameters.
    Physics,
    /// Integration or decomposition failure.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model error: {0}")]
    Model(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("singular {what}: {message}")]
    Singular { what: &'static str, message: String },

    #[error("outside perturbative regime: {0}")]
    Regime(String),

    #[error("trajectory is not cyclic: |n(T) - n(0)| = {mismatch:.3e}")]
    NotCyclic { mismatch: f64 },

    #[error("trajectory under-sampled: consecutive Bloch vectors {gap:.3} rad apart (limit {limit})")]
    UnderSampled { gap: f64, limit: f64 },

    #[error("norm drift {drift:.3e} exceeds {limit:.0e} with dt = {dt:.3e} fs; use a smaller step")]
    StepSize { drift: f64, limit: f64, dt: f64 },

    #[error("eigendecomposition did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e}, matrix norm {norm:.3e})")]
    Eigen { sweeps: usize, off_norm: f64, norm: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::StepSize { .. } | Error::Eigen { .. } | Error::Numerical(_) => ErrorKind::Numerical,
            _ => ErrorKind::Physics,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
