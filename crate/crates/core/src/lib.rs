//! Value functions of state-constrained Hamilton–Jacobi problems for logit
//! dynamics in coordination games, on barycentric simplex grids.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closedform;
pub mod error;
pub mod experiments;
pub mod game;
pub mod geometry;
pub mod hamiltonian;
pub mod mcsim;
pub mod solver;

pub use error::{Error, Result};
