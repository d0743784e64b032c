use core::fmt;

use crate::linalg::Subsystem;

/// Everything that can go wrong inside the simulator core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    NonFinite,
    NotHermitian {
        residual: f64,
    },
    EigenNoConvergence {
        sweeps: usize,
        off_norm: f64,
    },
    UnknownSubsystem(Subsystem),
    DuplicateSubsystem(Subsystem),
    EmptyKeepSet,
    InvalidState(StateViolation),
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// `ω_{M2}β₂ = ω_{M1}β₁`: the virtual temperature diverges.
    EquilibriumDegeneracy,
    InvalidGrid {
        reason: &'static str,
    },
    GridMismatch,
    Integration(IntegrationFailure),
}

/// Which density-matrix invariant failed and by how much.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateViolation {
    Trace { trace: f64 },
    Hermiticity { residual: f64 },
    Negativity { min_eigenvalue: f64 },
}

/// Integrator abort diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationFailure {
    pub step: usize,
    pub t: f64,
    pub violation: StateViolation,
}

impl fmt::Display for StateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateViolation::Trace { trace } => write!(f, "trace {trace} deviates from 1"),
            StateViolation::Hermiticity { residual } => {
                write!(f, "hermiticity residual {residual:e}")
            }
            StateViolation::Negativity { min_eigenvalue } => {
                write!(f, "negative eigenvalue {min_eigenvalue:e}")
            }
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite => write!(f, "matrix contains NaN or infinite entries"),
            Error::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (residual {residual:e})")
            }
            Error::EigenNoConvergence { sweeps, off_norm } => write!(
                f,
                "Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
            ),
            Error::UnknownSubsystem(s) => write!(f, "subsystem {s} is not part of the layout"),
            Error::DuplicateSubsystem(s) => write!(f, "subsystem {s} appears twice in the layout"),
            Error::EmptyKeepSet => write!(f, "partial trace must keep at least one subsystem"),
            Error::InvalidState(v) => write!(f, "invalid density matrix: {v}"),
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::EquilibriumDegeneracy => write!(
                f,
                "virtual temperature undefined: omega_m2/t2 equals omega_m1/t1"
            ),
            Error::InvalidGrid { reason } => write!(f, "invalid time grid: {reason}"),
            Error::GridMismatch => write!(f, "trajectories do not share a time grid"),
            Error::Integration(fail) => write!(
                f,
                "integration failed at step {} (t = {}): {}",
                fail.step, fail.t, fail.violation
            ),
        }
    }
}

impl core::error::Error for Error {}
