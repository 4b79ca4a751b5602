//! Block Gaussian random-matrix ensembles and their limit moments.
//!
//! Three independent routes to the same numbers:
//!
//! * [`rmt`] samples Hermitian and Ginibre block matrices at finite size and
//!   estimates mixed moments of blocks under partial traces, with an exact
//!   finite-size Wick oracle alongside;
//! * [`fock`] and [`families`] evaluate the limit moments exactly as vacuum
//!   expectations of operators on the matricially free Fock space;
//! * [`combinatorics`] gives the closed forms (Catalan, Narayana,
//!   Fuss-Narayana, Marchenko-Pastur, free multiplicative convolution,
//!   Jacobi-parameter moments).
//!
//! [`harness`] ties them together into reproducible comparison reports.

pub mod block_model;
pub mod combinatorics;
mod error;
pub mod exec;
pub mod families;
pub mod fock;
pub mod harness;
pub mod rational;
pub mod rmt;
pub mod surd;
pub mod word;

pub use error::{Error, Result};
pub use exec::Execution;
