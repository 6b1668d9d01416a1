//! Exact asymptotic expansion of the radially symmetric Dirichlet
//! eigenvalues of regular N-gons in powers of 1/N, with coefficients in
//! multiple zeta values.
//!
//! The pipeline is: word algebra ([`words`]) and MZV symbols ([`mzvalg`]),
//! regularized products of polylogarithms on the unit circle ([`polyreg`]),
//! the special-function series of the problem ([`kernels`]), and the
//! order-by-order boundary solver ([`engine`]). [`closedform`] and
//! [`numeval`] provide independent checks.

pub mod closedform;
pub mod engine;
pub mod error;
pub mod kernels;
pub mod mzvalg;
pub mod numeval;
pub mod polyreg;
pub mod reference;
pub mod ring;
pub mod serialize;
pub mod series;
pub mod verify;
pub mod words;
pub mod cli;

pub use error::{Error, Result};
