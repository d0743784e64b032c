//! Tensor-product bookkeeping: which subsystem lives in which factor.

use alloc::vec::Vec;
use core::fmt;

use super::matrix::CMatrix;
use crate::error::Error;

/// Named tensor factors of the composite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    /// Cold machine qubit.
    M1,
    /// Hot machine qubit.
    M2,
    /// Charger.
    C,
    /// Battery.
    B,
}

impl Subsystem {
    pub const ALL: [Subsystem; 4] = [Subsystem::M1, Subsystem::M2, Subsystem::C, Subsystem::B];

    pub fn label(self) -> &'static str {
        match self {
            Subsystem::M1 => "M1",
            Subsystem::M2 => "M2",
            Subsystem::C => "C",
            Subsystem::B => "B",
        }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Ordered list of `(label, local dimension)`; the first factor's index
/// varies slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    slots: Vec<(Subsystem, usize)>,
}

impl SubsystemLayout {
    pub fn new(slots: Vec<(Subsystem, usize)>) -> Result<Self, Error> {
        if slots.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        for (i, (s, d)) in slots.iter().enumerate() {
            if *d == 0 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: 0,
                });
            }
            if slots[..i].iter().any(|(t, _)| t == s) {
                return Err(Error::DuplicateSubsystem(*s));
            }
        }
        Ok(SubsystemLayout { slots })
    }

    /// `M1 ⊗ M2 ⊗ C ⊗ B`, all qubits.
    pub fn standard() -> Self {
        SubsystemLayout {
            slots: Subsystem::ALL.iter().map(|&s| (s, 2)).collect(),
        }
    }

    /// Qubit layout over the given labels in order.
    pub fn qubits(labels: &[Subsystem]) -> Result<Self, Error> {
        Self::new(labels.iter().map(|&s| (s, 2)).collect())
    }

    pub fn total_dim(&self) -> usize {
        self.slots.iter().map(|(_, d)| d).product()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = Subsystem> + '_ {
        self.slots.iter().map(|(s, _)| *s)
    }

    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().map(|(_, d)| *d)
    }

    pub fn position(&self, s: Subsystem) -> Option<usize> {
        self.slots.iter().position(|(t, _)| *t == s)
    }

    pub fn contains(&self, s: Subsystem) -> bool {
        self.position(s).is_some()
    }

    pub fn local_dim(&self, s: Subsystem) -> Result<usize, Error> {
        self.position(s)
            .map(|p| self.slots[p].1)
            .ok_or(Error::UnknownSubsystem(s))
    }

    /// Sub-layout with only `keep`, in this layout's order.
    pub fn restrict(&self, keep: &[Subsystem]) -> Result<Self, Error> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        for s in keep {
            if !self.contains(*s) {
                return Err(Error::UnknownSubsystem(*s));
            }
        }
        Ok(SubsystemLayout {
            slots: self
                .slots
                .iter()
                .filter(|(s, _)| keep.contains(s))
                .copied()
                .collect(),
        })
    }

    /// Per-factor digits of a composite basis index.
    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for (slot, (_, d)) in out.iter_mut().zip(&self.slots).rev() {
            *slot = index % d;
            index /= d;
        }
    }
}

/// Lifts a local operator into the composite space:
/// `I ⊗ … ⊗ op ⊗ … ⊗ I`.
pub fn embed(op: &CMatrix, slot: Subsystem, layout: &SubsystemLayout) -> Result<CMatrix, Error> {
    let pos = layout.position(slot).ok_or(Error::UnknownSubsystem(slot))?;
    let local = layout.slots[pos].1;
    if op.dim() != local {
        return Err(Error::DimensionMismatch {
            expected: local,
            found: op.dim(),
        });
    }
    let before: usize = layout.slots[..pos].iter().map(|(_, d)| d).product();
    let after: usize = layout.slots[pos + 1..].iter().map(|(_, d)| d).product();
    Ok(CMatrix::identity(before)
        .kron(op)
        .kron(&CMatrix::identity(after)))
}

/// Traces out every factor not in `keep`. The result is laid out in the
/// original factor order restricted to `keep`.
pub fn partial_trace(
    m: &CMatrix,
    layout: &SubsystemLayout,
    keep: &[Subsystem],
) -> Result<(CMatrix, SubsystemLayout), Error> {
    if m.dim() != layout.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.total_dim(),
            found: m.dim(),
        });
    }
    let reduced = layout.restrict(keep)?;
    let n = m.dim();
    let nf = layout.len();

    // (kept index, traced index) of every composite basis index
    let mut split = Vec::with_capacity(n);
    let mut digits = alloc::vec![0usize; nf];
    for i in 0..n {
        layout.digits(i, &mut digits);
        let (mut kept, mut traced) = (0usize, 0usize);
        for (f, (s, d)) in layout.slots.iter().enumerate() {
            if keep.contains(s) {
                kept = kept * d + digits[f];
            } else {
                traced = traced * d + digits[f];
            }
        }
        split.push((kept, traced));
    }

    let mut out = CMatrix::zeros(reduced.total_dim());
    for i in 0..n {
        let (ki, ti) = split[i];
        for j in 0..n {
            let (kj, tj) = split[j];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok((out, reduced))
}
