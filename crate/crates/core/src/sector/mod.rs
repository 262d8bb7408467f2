//! Magnon-sector bases and the operators acting on them.

mod basis;
mod free;
mod ops;

pub use basis::{binomial, MagnonBasis, SubsetIter, MAX_SECTOR_DIM};
pub use free::{
    contraction_t, contraction_t_restricted, factorial, free_laplacian, lower_function, FunctionSpaceIndex,
    MAX_FUNCTION_DIM,
};
pub use ops::{
    casimir_magnon, hamiltonian_magnon, highest_weight_basis, lowering_matrix, numerical_rank, range_basis,
    HighestWeightBasis, REORTH_TOL,
};
