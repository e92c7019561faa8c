//! Monte Carlo laboratory for a dependent drainage network on Z^d.
//!
//! Each vertex is open with probability `p`; every vertex links to the
//! open vertex of smallest label in the lowest level of its upward l1 cone
//! that contains one. All randomness is a pure function of a seed and
//! lattice coordinates, so every run is reproducible.

pub mod analytic;
pub mod cli;
pub mod dynamics;
pub mod env;
pub mod error;
pub mod geometry;
pub mod joint;
pub mod replicate;
pub mod stats;
pub mod treescan;

pub use env::{LatticePoint, Model, ModelParams};
pub use error::{Error, Result};
