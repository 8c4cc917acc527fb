use thiserror::Error;

/// Errors shared by all solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wavefunction has zero norm")]
    ZeroNorm,

    #[error("wavefunction not normalized (|norm - 1| = {0:.3e})")]
    NotNormalized(f64),

    #[error("no double well: ln argument 2*U0*n_ss/dx^2 = {0:.6e} <= 1")]
    NoDoubleWell(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("no variational minimum found")]
    NoMinimum,

    #[error("Fock dimension {0} outside supported range 1..=12")]
    FockDimension(u32),

    #[error("Poisson truncation too coarse: tail mass {0:.3e} beyond n_max")]
    PoissonTruncation(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
