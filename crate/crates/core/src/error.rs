use thiserror::Error;

/// Errors raised by the numerical routines and the sweep engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |h - h^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("linear system is singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dispersive coupling chi must be nonzero")]
    ZeroChi,

    #[error("steady state has negative eigenvalue {min_eigenvalue:e}; raise the Fock truncation")]
    PositivityViolation { min_eigenvalue: f64 },

    #[error("step size {dt:e} too large (dt * scale = {product:e} > {limit})")]
    StepTooLarge { dt: f64, product: f64, limit: f64 },

    #[error("mean photon number {mean_n:e} too small for a correlation estimate")]
    NoPhotons { mean_n: f64 },

    #[error("Fock truncation N = {n_max} keeps only {captured} of the coherent-state weight")]
    TruncationTooSmall { n_max: usize, captured: f64 },

    #[error("Liouvillian dimension {dim} exceeds the dense limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
