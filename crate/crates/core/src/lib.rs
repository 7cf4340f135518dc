//! Sparse linear solver toolkit built around the CSRO row-offset format.
//!
//! The crate covers storage formats and Matrix Market ingestion ([`matrix`]),
//! level scheduling and Jones-Plassmann coloring ([`reorder`]), per-color
//! vector partitions ([`sparstition`]), ILU0 and Jacobi preconditioning
//! ([`precond`]), preconditioned BiCGStab ([`solver`]) and a cycle-count
//! model of a streaming accelerator for the same solver ([`perfmodel`]).

pub mod cli;
pub mod error;
pub mod gallery;
pub mod matrix;
pub mod perfmodel;
pub mod precond;
pub mod reorder;
pub mod solver;
pub mod sparstition;

pub use error::Error;
pub use matrix::{BsrMatrix, CsrMatrix, CsroMatrix};
