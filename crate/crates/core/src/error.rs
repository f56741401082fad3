use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("generator `{name}` is not skew-Hermitian (residual {residual:.3e})")]
    NotSkewHermitian { name: String, residual: f64 },

    #[error("generator `{name}` is not traceless (|trace| = {trace:.3e})")]
    NotTraceless { name: String, trace: f64 },

    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("element is not regular (minimum eigenvalue gap {gap:.3e})")]
    NotRegular { gap: f64 },

    #[error("closure did not saturate within {limit} sweeps")]
    ClosureLimit { limit: usize },

    #[error("candidate lies inside the product subalgebra (distance {distance:.3e}); any extension element must lie outside it")]
    InsideSubalgebra { distance: f64 },

    #[error("flow is not periodic within the rationality bound")]
    Aperiodic,

    #[error("finite-difference step underflows at duration {0}")]
    StepUnderflow(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid discrete state: {0}")]
    InvalidState(String),

    #[error("states are not equivalent")]
    NotEquivalent,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
