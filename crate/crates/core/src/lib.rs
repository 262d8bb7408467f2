//! Exact diagonalization of the spin-½ Heisenberg ferromagnet on finite
//! graphs, organized by magnon sector.

pub mod analysis;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod foel;
pub mod graph;
pub mod report;
pub mod sector;
pub mod sparse;
pub mod spinwave;

pub use error::{HeisError, Result};
pub use graph::Graph;
pub use sparse::SparseOp;
