use thiserror::Error;

/// Errors surfaced by the spectral laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample array has shape {got:?}, grid expects {expected:?}")]
    DimensionMismatch {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("inverse transform produced imaginary residue {max_imag:.3e} (limit {limit:.3e})")]
    NonRealField { max_imag: f64, limit: f64 },

    #[error("spectral weight exponent {max_exponent:.3e} exceeds representable range")]
    WeightOverflow { max_exponent: f64 },

    #[error("profile is not divergence free: residual {residual:.3e}")]
    NotDivergenceFree { residual: f64 },

    #[error("phase admissibility violated: lambda*theta = {lambda_theta:.6e} > a = {a:.6e}")]
    AdmissibilityViolated { lambda_theta: f64, a: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("checkpoint is not a recognised state file: {0}")]
    BadCheckpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
