//! Exact computations in the linear (−1)-shifted symplectic category:
//! Lagrangian relations, perturbative BV integrals over rational data, and
//! homotopy transfer of quantum L∞ algebras.

pub mod cli;
pub mod density;
pub mod error;
pub mod formal;
pub mod graded;
pub mod integral;
pub mod matrix;
pub mod quantum;
pub mod random;
pub mod scalar;
pub mod symplectic;
pub mod verify;
pub mod wire;

pub use error::{Error, Result};
