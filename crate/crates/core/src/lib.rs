//! Effective Lindbladians for perturbations of open quantum systems with a
//! decoherence-free subspace.

pub mod channel;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod operator;
pub mod qec;
pub mod random;
pub mod scenarios;

pub use error::{EjofError, Result};
pub use operator::{Corner, CorneredOperator, DfsProjector, Operator, Superoperator, C64};
