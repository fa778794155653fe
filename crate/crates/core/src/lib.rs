//! Exact computation of the polytope of coherent lower previsions on a
//! finite set of gambles.
//!
//! The pipeline normalizes gambles, adds singleton indicators, generates a
//! finite sufficient set of coherence constraints, removes redundancy,
//! projects back onto the original gambles and enumerates the extreme
//! coherent lower previsions with their adjacency. Everything runs on exact
//! rationals.

pub mod catalog;
pub mod cli;
pub mod coherence;
pub mod credal;
pub mod error;
pub mod gambles;
pub mod io;
pub mod polytope;
pub mod ratlinalg;

pub use error::{Error, Result};
pub use ratlinalg::Rational;
