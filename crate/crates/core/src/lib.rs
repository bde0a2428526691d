//! Cellular matroids of Vietoris-Rips complexes.

pub mod complex;
pub mod error;
pub mod exactla;
pub mod flow;
pub mod homology;
pub mod harness;
pub mod invariants;
pub mod matroid;
pub mod pointcloud;

pub use error::{Error, Result};
