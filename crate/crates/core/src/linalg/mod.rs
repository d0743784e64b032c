//! Dense complex linear algebra for small composite quantum systems.
//!
//! Dimensions here are tiny (≤ 16), so storage is dense and allocation per
//! operation is fine; [`SparseMatrix`] covers the generator's hot loop.

mod eig;
mod layout;
mod matrix;
mod sparse;

pub use eig::{
    hermitian_eig, hermitian_eigenvalues, min_eigenvalue, trace_norm, HermitianEig,
    HERMITIAN_INPUT_TOL, MAX_SWEEPS, OFF_DIAGONAL_TOL,
};
pub use layout::{embed, partial_trace, Subsystem, SubsystemLayout};
pub use matrix::{kron, kron_all, qubit, CMatrix, C64, I, ONE, ZERO};
pub use sparse::SparseMatrix;
