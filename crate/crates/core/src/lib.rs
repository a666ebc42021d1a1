//! Truncated 2D Yang-Mills Frobenius operators, their compilation to
//! ancilla-assisted post-selected circuits, and dense statevector checks.

pub mod circuit;
pub mod duality;
pub mod encoding;
pub mod error;
pub mod frobenius;
pub mod operator;
pub mod pauli;
pub mod reptheory;
pub mod statevector;
pub mod verify;

pub use error::{Error, Result};
