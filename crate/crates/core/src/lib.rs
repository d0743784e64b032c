//! Simulation core for a quantum battery charged through a driven charger
//! that is coupled to a two-qubit autonomous thermal machine.
//!
//! The composite system is `M1 ⊗ M2 ⊗ C ⊗ B` (16 dimensions). The crate is
//! `no_std` and only needs `alloc`:
//!
//! * [`linalg`]: dense complex matrices, Kronecker products, partial
//!   traces, a Jacobi Hermitian eigensolver.
//! * [`model`]: parameters, Hamiltonians, Gibbs states, thermal jump
//!   operators, virtual temperature.
//! * [`dynamics`]: the local Lindblad generator and a fixed-step RK4
//!   integrator with state hygiene.
//! * [`observables`]: entropies, mutual information, trace-distance
//!   derivative, energies, power, coherence, passive state and ergotropy.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
mod error;
pub mod linalg;
pub mod model;
pub mod observables;
mod state;

pub use error::{Error, IntegrationFailure, StateViolation};
pub use state::{DensityMatrix, HERMITICITY_TOL, NEGATIVITY_TOL, TRACE_TOL};
