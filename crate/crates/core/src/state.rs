use crate::error::{Error, StateViolation};
use crate::linalg::{self, CMatrix, Subsystem, SubsystemLayout};

/// `|Tr ρ − 1|` bound for a valid state.
pub const TRACE_TOL: f64 = 1e-8;
/// `‖ρ − ρ†‖_max` bound for a valid state.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue.
pub const NEGATIVITY_TOL: f64 = -1e-8;

/// A validated density matrix together with its tensor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    layout: SubsystemLayout,
}

impl DensityMatrix {
    /// Checks trace, Hermiticity and positivity.
    pub fn new(matrix: CMatrix, layout: SubsystemLayout) -> Result<Self, Error> {
        if matrix.dim() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: matrix.dim(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        check_state(&matrix)?;
        Ok(DensityMatrix { matrix, layout })
    }

    /// Skips validation. Callers guarantee the invariants hold (partial
    /// traces and Kronecker products of valid states, integrator output that
    /// was already checked).
    pub(crate) fn new_unchecked(matrix: CMatrix, layout: SubsystemLayout) -> Self {
        debug_assert_eq!(matrix.dim(), layout.total_dim());
        DensityMatrix { matrix, layout }
    }

    /// Single-qubit state labelled `slot`.
    pub fn qubit(matrix: CMatrix, slot: Subsystem) -> Result<Self, Error> {
        Self::new(matrix, SubsystemLayout::qubits(&[slot])?)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `ρ_self ⊗ ρ_other` with concatenated layouts.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix, Error> {
        let slots = self
            .layout
            .labels()
            .zip(self.layout.dims())
            .chain(other.layout.labels().zip(other.layout.dims()))
            .collect();
        let layout = SubsystemLayout::new(slots)?;
        Ok(DensityMatrix::new_unchecked(
            self.matrix.kron(&other.matrix),
            layout,
        ))
    }

    /// Reduced state on `keep`.
    pub fn partial_trace(&self, keep: &[Subsystem]) -> Result<DensityMatrix, Error> {
        let (m, layout) = linalg::partial_trace(&self.matrix, &self.layout, keep)?;
        Ok(DensityMatrix::new_unchecked(m, layout))
    }

    /// `Tr(op · ρ)` for an operator on the full space.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        op.matmul(&self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Result<alloc::vec::Vec<f64>, Error> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }
}

fn check_state(m: &CMatrix) -> Result<(), Error> {
    let tr = m.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidState(StateViolation::Trace { trace: tr.re }));
    }
    let residual = m.hermiticity_residual();
    if residual > HERMITICITY_TOL {
        return Err(Error::InvalidState(StateViolation::Hermiticity {
            residual,
        }));
    }
    let min = linalg::min_eigenvalue(m)?;
    if min < NEGATIVITY_TOL {
        return Err(Error::InvalidState(StateViolation::Negativity {
            min_eigenvalue: min,
        }));
    }
    Ok(())
}
