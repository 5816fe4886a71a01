//! Schur-complement based semi-proximal ADMM for multi-block convex
//! programs with one coupling linear constraint, with the 2-block variants,
//! the directly extended ADMM baseline, test-problem builders and a
//! benchmark harness.

pub mod baseline;
pub mod dense;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod instances;
mod kernels;
pub mod linops;
pub mod model;
pub mod prox;
pub mod scb;
pub mod solver2;

pub use error::{Error, Result};
