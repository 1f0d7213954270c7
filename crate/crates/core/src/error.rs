use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EjofError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("vector of length {0} is not a vectorized square matrix")]
    NotPerfectSquare(usize),

    #[error("{what} is not Hermitian (residual {residual:.3e})")]
    NotHermitian { what: String, residual: f64 },

    #[error("not an orthogonal projector (residual {residual:.3e})")]
    NotProjector { residual: f64 },

    #[error("zero eigenvalue is not semisimple: nilpotent part of norm {residual:.3e} exceeds {threshold:.3e}")]
    NonSemisimpleZero { residual: f64, threshold: f64 },

    #[error("singular {what}: {detail}")]
    Singular { what: String, detail: String },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("Lindbladian violates the structural assumptions: {0}")]
    NotStructured(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, EjofError>;
