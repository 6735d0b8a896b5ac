use alloc::string::String;

/// Errors raised by the numerical engines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{context}: dimension mismatch, expected {expected} but found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hermitian positive semidefinite (most negative eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("Kraus elements are not trace preserving: |sum E^dag E - I| = {deviation:e}")]
    NotTracePreserving { deviation: f64 },

    #[error("Kraus elements exceed the identity: |sum E^dag E| = {norm:e}")]
    NotSubnormalized { norm: f64 },

    #[error("matrix is not unitary: |U^dag U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not an isometry: |V^dag V - I| = {deviation:e}")]
    NotIsometry { deviation: f64 },

    #[error("matrix is not a projector: residual {residual:e}")]
    NotProjector { residual: f64 },

    #[error("stochastic matrix column {column} sums to {sum}")]
    ColumnSum { column: usize, sum: f64 },

    #[error("stochastic matrix has invalid entry {value} at ({row}, {column})")]
    InvalidProbability {
        row: usize,
        column: usize,
        value: f64,
    },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("operator is not supported on the code subspace (|PXP - X| = {residual:e})")]
    SupportMismatch { residual: f64 },

    #[error("channel annihilates the code subspace")]
    AnnihilatedCode,

    #[error(
        "structure decomposition failed after {attempts} attempts (worst residual {residual:e})"
    )]
    DecompositionFailed { attempts: usize, residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
