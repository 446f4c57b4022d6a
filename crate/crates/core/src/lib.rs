//! Algebraically solvable two-variable discrete-time maps.
//!
//! A linear-in-`y1` system with power-law coupling is solved in closed form
//! and carried over to maps on polynomial zeros through the coefficient/zero
//! bridges. The crate provides the step maps, the closed-form solvers, and a
//! harness that checks the two against each other.

pub mod bridge;
pub mod cli;
pub mod error;
pub mod harness;
pub mod maps;
pub mod numeric;
pub mod pair;
pub mod solver;
pub mod ysystem;

pub use error::{Error, Result};
pub use numeric::{Cx, Sign, SignSequence, Tolerance};
