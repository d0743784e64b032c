//! Diagnostics evaluated on states and trajectories: entropies, mutual
//! information, trace-distance derivative, energies, charging power,
//! relative entropy of coherence, passive state and ergotropy.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::Trajectory;
use crate::error::Error;
use crate::linalg::{hermitian_eig, qubit, trace_norm, CMatrix, Subsystem};
use crate::model::ModelParams;
use crate::state::DensityMatrix;

/// Eigenvalues below this are treated as exact zeros in `λ log λ`.
pub const ENTROPY_CLIP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    /// Bits.
    #[default]
    Two,
    /// Nats.
    E,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

/// `−Σ λ log λ` with `0 log 0 = 0`.
pub fn spectrum_entropy(eigenvalues: &[f64], base: LogBase) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > ENTROPY_CLIP)
        .map(|&l| -l * base.log(l))
        .sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> Result<f64, Error> {
    Ok(spectrum_entropy(&rho.eigenvalues()?, base))
}

fn reduced_entropy(state: &DensityMatrix, keep: &[Subsystem], base: LogBase) -> Result<f64, Error> {
    von_neumann_entropy(&state.partial_trace(keep)?, base)
}

/// `I_{CB} = S(ρ_C) + S(ρ_B) − S(ρ_{CB})`.
pub fn mutual_information_cb(state: &DensityMatrix, base: LogBase) -> Result<f64, Error> {
    use Subsystem::{B, C};
    Ok(
        reduced_entropy(state, &[C], base)? + reduced_entropy(state, &[B], base)?
            - reduced_entropy(state, &[C, B], base)?,
    )
}

/// Total correlation of the split `M12 | C | B`:
/// `S(ρ_{M12}) + S(ρ_C) + S(ρ_B) − S(ρ)`, with `ρ_{M12}` the joint
/// two-qubit machine marginal.
pub fn mutual_information_m12cb(state: &DensityMatrix, base: LogBase) -> Result<f64, Error> {
    use Subsystem::{B, C, M1, M2};
    Ok(reduced_entropy(state, &[M1, M2], base)?
        + reduced_entropy(state, &[C], base)?
        + reduced_entropy(state, &[B], base)?
        - von_neumann_entropy(state, base)?)
}

/// Named real series on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub name: String,
    pub unit: String,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: &str, unit: &str, t: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(t.len(), values.len(), "series length mismatch");
        TimeSeries {
            name: name.into(),
            unit: unit.into(),
            t,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Keeps every `every`-th sample.
    pub fn subsample(&self, every: usize) -> TimeSeries {
        let pick = |v: &[f64]| v.iter().step_by(every.max(1)).copied().collect();
        TimeSeries {
            name: self.name.clone(),
            unit: self.unit.clone(),
            t: pick(&self.t),
            values: pick(&self.values),
        }
    }
}

/// `½‖ρ_keep^α − ρ_keep^β‖₁`.
pub fn trace_distance(
    alpha: &DensityMatrix,
    beta: &DensityMatrix,
    keep: &[Subsystem],
) -> Result<f64, Error> {
    let a = alpha.partial_trace(keep)?;
    let b = beta.partial_trace(keep)?;
    Ok(0.5 * trace_norm(&(a.matrix() - b.matrix()))?)
}

/// Derivative on a uniform grid of spacing `h`: central differences in
/// the interior, first-order one-sided at the two ends.
pub fn finite_difference(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    (values[1] - values[0]) / h
                } else if i == n - 1 {
                    (values[n - 1] - values[n - 2]) / h
                } else {
                    (values[i + 1] - values[i - 1]) / (2.0 * h)
                }
            })
            .collect(),
    }
}

/// `σ(t) = dD/dt` from a trace-distance series on a uniform grid.
pub fn sigma_from_distance(name: &str, t: &[f64], distance: &[f64]) -> Result<TimeSeries, Error> {
    if t.len() != distance.len() {
        return Err(Error::GridMismatch);
    }
    let h = if t.len() > 1 { t[1] - t[0] } else { 1.0 };
    Ok(TimeSeries::new(
        name,
        "1/time",
        t.to_vec(),
        finite_difference(distance, h),
    ))
}

/// Trace-distance derivative of the reduced states on `subsystem` of two
/// trajectories sharing a grid. Positive: information flows out of the
/// subsystem; negative: it flows back.
pub fn sigma_n(
    alpha: &Trajectory,
    beta: &Trajectory,
    subsystem: &[Subsystem],
) -> Result<TimeSeries, Error> {
    if alpha.times != beta.times || alpha.len() < 2 {
        return Err(Error::GridMismatch);
    }
    let d = alpha
        .states
        .iter()
        .zip(&beta.states)
        .map(|(a, b)| trace_distance(a, b, subsystem))
        .collect::<Result<Vec<_>, _>>()?;
    let mut name = String::from("sigma_");
    for s in subsystem {
        name.push_str(s.label());
    }
    sigma_from_distance(&name, &alpha.times, &d)
}

/// Bare frequency of a qubit.
pub fn omega_of(p: &ModelParams, slot: Subsystem) -> f64 {
    match slot {
        Subsystem::M1 => p.omega_m1,
        Subsystem::M2 => p.omega_m2,
        Subsystem::C => p.omega_c,
        Subsystem::B => p.omega_b,
    }
}

/// `E_n = Tr[H_n ρ_n]` with `H_n = ω_n|1⟩⟨1|`.
pub fn subsystem_energy(state: &DensityMatrix, slot: Subsystem, omega: f64) -> Result<f64, Error> {
    let reduced = state.partial_trace(&[slot])?;
    let h = qubit::excited_projector().scale_real(omega);
    Ok(h.matmul(reduced.matrix()).trace().re)
}

/// `ΔE_n(t)/ω_n` along a trajectory.
pub fn internal_energy(
    traj: &Trajectory,
    slot: Subsystem,
    p: &ModelParams,
) -> Result<TimeSeries, Error> {
    let omega = omega_of(p, slot);
    let e = traj
        .states
        .iter()
        .map(|s| subsystem_energy(s, slot, omega))
        .collect::<Result<Vec<_>, _>>()?;
    let e0 = e.first().copied().unwrap_or(0.0);
    let mut name = String::from("delta_e_");
    name.push_str(&slot.label().to_lowercase());
    Ok(TimeSeries::new(
        &name,
        "omega",
        traj.times.clone(),
        e.iter().map(|x| (x - e0) / omega).collect(),
    ))
}

/// `Σ_m (E_{Mm}(t) − E_{Mm}(0))/ω_{Mm}` for one state, given the initial
/// machine energies.
pub fn machine_energy_change(
    state: &DensityMatrix,
    p: &ModelParams,
    initial: (f64, f64),
) -> Result<f64, Error> {
    let e1 = subsystem_energy(state, Subsystem::M1, p.omega_m1)?;
    let e2 = subsystem_energy(state, Subsystem::M2, p.omega_m2)?;
    Ok((e1 - initial.0) / p.omega_m1 + (e2 - initial.1) / p.omega_m2)
}

/// `ΔE_{M12}(t)` along a trajectory.
pub fn machine_energy(traj: &Trajectory, p: &ModelParams) -> Result<TimeSeries, Error> {
    let first = traj.states.first().ok_or(Error::GridMismatch)?;
    let initial = (
        subsystem_energy(first, Subsystem::M1, p.omega_m1)?,
        subsystem_energy(first, Subsystem::M2, p.omega_m2)?,
    );
    let values = traj
        .states
        .iter()
        .map(|s| machine_energy_change(s, p, initial))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TimeSeries::new(
        "delta_e_m12",
        "1",
        traj.times.clone(),
        values,
    ))
}

/// `ΔP_B(t) = ΔE_B(t)/t`, defined as 0 at `t = 0`. Keeps the input's
/// normalization.
pub fn charging_power(delta_e_b: &TimeSeries) -> TimeSeries {
    let values = delta_e_b
        .t
        .iter()
        .zip(&delta_e_b.values)
        .map(|(&t, &e)| power_at(t, e))
        .collect();
    TimeSeries::new("power_b", "omega/time", delta_e_b.t.clone(), values)
}

pub fn power_at(t: f64, delta_e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        delta_e / t
    }
}

/// `S(ρ̃) − S(ρ)` where `ρ̃` keeps only the diagonal of `ρ`.
pub fn relative_entropy_of_coherence(rho: &DensityMatrix, base: LogBase) -> Result<f64, Error> {
    let dephased = rho.matrix().diagonal_real();
    Ok((spectrum_entropy(&dephased, base) - von_neumann_entropy(rho, base)?).max(0.0))
}

/// Passive state: populations of `rho_b` sorted descending, placed on the
/// eigenbasis of `h_b` sorted by ascending energy.
pub fn passive_state(rho_b: &DensityMatrix, h_b: &CMatrix) -> Result<DensityMatrix, Error> {
    let (pops, h) = passive_parts(rho_b, h_b)?;
    let n = pops.len();
    let mut m = CMatrix::zeros(n);
    for (j, &p) in pops.iter().enumerate() {
        let v = h.column(j);
        m.add_scaled_real(p, &CMatrix::outer(&v));
    }
    Ok(DensityMatrix::new_unchecked(
        m.hermitian_part(),
        rho_b.layout().clone(),
    ))
}

fn passive_parts(
    rho_b: &DensityMatrix,
    h_b: &CMatrix,
) -> Result<(Vec<f64>, crate::linalg::HermitianEig), Error> {
    if h_b.dim() != rho_b.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_b.dim(),
            found: h_b.dim(),
        });
    }
    let mut pops = rho_b.eigenvalues()?;
    pops.sort_by(|a, b| b.total_cmp(a));
    Ok((pops, hermitian_eig(h_b)?))
}

/// Energy of the passive state: `Σ_j p_j^↓ ω_j^↑`.
pub fn passive_energy(rho_b: &DensityMatrix, h_b: &CMatrix) -> Result<f64, Error> {
    let (pops, h) = passive_parts(rho_b, h_b)?;
    Ok(pops.iter().zip(&h.eigenvalues).map(|(p, w)| p * w).sum())
}

/// `ε = Tr[H ρ] − E_passive`, clamped at 0 against rounding.
pub fn ergotropy(rho_b: &DensityMatrix, h_b: &CMatrix) -> Result<f64, Error> {
    let energy = h_b.matmul(rho_b.matrix()).trace().re;
    Ok((energy - passive_energy(rho_b, h_b)?).max(0.0))
}
