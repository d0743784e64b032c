//! Time evolution under the local Lindblad master equation
//!
//! ```text
//! dρ/dt = −i[H₀, ρ] + φ(t)·( −i[ΔH_F(t) + H_{C−B} + H_{M12−C}, ρ]
//!                           + Σ_j r_j (L_j ρ L_j† − ½{L_j†L_j, ρ}) )
//! ```
//!
//! integrated with classical fixed-step RK4. After every step the state is
//! re-symmetrized and its trace renormalized; the size of each correction is
//! recorded in [`HygieneStats`] and the run aborts if it exceeds
//! [`ABORT_TRACE_DRIFT`] or if a stored state has an eigenvalue below
//! [`ABORT_NEGATIVITY`].

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, IntegrationFailure, StateViolation};
use crate::linalg::{
    embed, min_eigenvalue, qubit, CMatrix, SparseMatrix, Subsystem, SubsystemLayout, C64,
};
use crate::model::{ModelParams, SystemOperators};
use crate::state::DensityMatrix;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_STRIDE: usize = 10;
/// Largest admissible `dt · ω_max`.
pub const MAX_DT_OMEGA: f64 = 0.05;
pub const ABORT_TRACE_DRIFT: f64 = 1e-6;
pub const ABORT_NEGATIVITY: f64 = -1e-6;

/// Interaction window: 1 on `[0, τ]`, 0 elsewhere.
pub fn phi(t: f64, tau: f64) -> f64 {
    if t >= 0.0 && t <= tau {
        1.0
    } else {
        0.0
    }
}

/// Generator evaluated term by term with full commutators and
/// anticommutators. Reference form; [`MasterEquation::rhs`] is the fast path.
pub fn lindblad_rhs(p: &ModelParams, ops: &SystemOperators, t: f64, rho: &CMatrix) -> CMatrix {
    let minus_i = C64::new(0.0, -1.0);
    let mut out = ops.h0.commutator(rho).scale(minus_i);
    let window = phi(t, p.tau);
    if window == 0.0 {
        return out;
    }
    let h_int = &(&ops.drive(t) + &ops.h_cb) + &ops.h_m12c;
    let mut gated = h_int.commutator(rho).scale(minus_i);
    for j in &ops.jumps {
        let l_dag = j.op.adjoint();
        let sandwich = j.op.matmul(rho).matmul(&l_dag);
        let anti = l_dag.matmul(&j.op).anticommutator(rho);
        gated.add_scaled_real(j.rate, &sandwich);
        gated.add_scaled_real(-0.5 * j.rate, &anti);
    }
    out.add_scaled_real(window, &gated);
    out
}

/// Precomputed generator. Folds the anticommutator terms into a
/// non-Hermitian effective Hamiltonian `H − (i/2)Σ r_j L_j†L_j`, so one
/// product `H_eff ρ` and its adjoint give the coherent part and the decay
/// part together. Requires Hermitian `ρ`.
pub struct MasterEquation {
    ops: SystemOperators,
    tau: f64,
    drive_amplitude: f64,
    drive_frequency: f64,
    /// `H₀`, used outside the interaction window.
    h_free: SparseMatrix,
    /// `H₀ + H_{C−B} + H_{M12−C} − (i/2)Σ r_j L_j†L_j`.
    h_eff: SparseMatrix,
    raise_c: SparseMatrix,
    lower_c: SparseMatrix,
    channels: Vec<(SparseMatrix, f64)>,
}

impl MasterEquation {
    pub fn new(p: &ModelParams) -> Self {
        let ops = SystemOperators::new(p);
        let mut h_eff = &(&ops.h0 + &ops.h_cb) + &ops.h_m12c;
        let mut channels = Vec::new();
        for j in &ops.jumps {
            if j.rate == 0.0 {
                continue;
            }
            h_eff.add_scaled(C64::new(0.0, -0.5 * j.rate), &j.op.adjoint().matmul(&j.op));
            channels.push((SparseMatrix::from_dense(&j.op), j.rate));
        }
        let raise = embed(
            &qubit::sigma_plus(),
            Subsystem::C,
            &SubsystemLayout::standard(),
        )
        .expect("standard layout holds the charger");
        MasterEquation {
            tau: p.tau,
            drive_amplitude: p.f,
            drive_frequency: p.omega_c,
            h_free: SparseMatrix::from_dense(&ops.h0),
            h_eff: SparseMatrix::from_dense(&h_eff),
            lower_c: SparseMatrix::from_dense(&raise.adjoint()),
            raise_c: SparseMatrix::from_dense(&raise),
            channels,
            ops,
        }
    }

    pub fn operators(&self) -> &SystemOperators {
        &self.ops
    }

    pub fn rhs(&self, t: f64, rho: &CMatrix) -> CMatrix {
        let minus_i = C64::new(0.0, -1.0);
        let mut a = CMatrix::zeros(rho.dim());
        if phi(t, self.tau) == 0.0 {
            self.h_free.mul_dense_acc(minus_i, rho, &mut a);
            return a.plus_adjoint();
        }
        self.h_eff.mul_dense_acc(minus_i, rho, &mut a);
        if self.drive_amplitude != 0.0 {
            let phase = C64::from_polar(self.drive_amplitude, -self.drive_frequency * t);
            self.raise_c.mul_dense_acc(minus_i * phase, rho, &mut a);
            self.lower_c
                .mul_dense_acc(minus_i * phase.conj(), rho, &mut a);
        }
        let mut out = a.plus_adjoint();
        for (op, rate) in &self.channels {
            op.sandwich_acc(*rate, rho, &mut out);
        }
        out
    }

    /// One classical RK4 step from `t` with stage times `t`, `t + dt/2`,
    /// `t + dt`.
    pub fn rk4_step(&self, t: f64, rho: &CMatrix, dt: f64) -> CMatrix {
        let half = 0.5 * dt;
        let mut acc = rho.clone();
        let mut y = rho.clone();

        let k = self.rhs(t, rho);
        acc.add_scaled_real(dt / 6.0, &k);
        y.add_scaled_real(half, &k);
        let k = self.rhs(t + half, &y);
        acc.add_scaled_real(dt / 3.0, &k);
        y.set_scaled_sum(rho, half, &k);
        let k = self.rhs(t + half, &y);
        acc.add_scaled_real(dt / 3.0, &k);
        y.set_scaled_sum(rho, dt, &k);
        let k = self.rhs(t + dt, &y);
        acc.add_scaled_real(dt / 6.0, &k);
        acc
    }
}

/// Uniform grid `t_i = i·dt`, `i = 0..=steps`, with states kept every
/// `stride` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dt: f64,
    pub t_max: f64,
    pub stride: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            dt: DEFAULT_DT,
            t_max: 100.0,
            stride: DEFAULT_STRIDE,
        }
    }
}

impl GridSpec {
    pub fn new(dt: f64, t_max: f64, stride: usize) -> Self {
        GridSpec { dt, t_max, stride }
    }

    /// Number of RK4 steps; errors if the grid is not uniform on
    /// `[0, t_max]` or the stride does not divide it.
    pub fn steps(&self) -> Result<usize, Error> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidGrid {
                reason: "dt must be finite and > 0",
            });
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidGrid {
                reason: "t_max must be finite and > 0",
            });
        }
        if self.stride == 0 {
            return Err(Error::InvalidGrid {
                reason: "stride must be >= 1",
            });
        }
        let n = (self.t_max / self.dt).round();
        if n < 1.0 || (n * self.dt - self.t_max).abs() > 1e-9 * self.t_max {
            return Err(Error::InvalidGrid {
                reason: "t_max must be an integer multiple of dt",
            });
        }
        let n = n as usize;
        if n % self.stride != 0 {
            return Err(Error::InvalidGrid {
                reason: "stride must divide t_max/dt",
            });
        }
        Ok(n)
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    /// Times of the stored states.
    pub fn stored_times(&self) -> Result<Vec<f64>, Error> {
        let n = self.steps()?;
        Ok((0..=n).step_by(self.stride).map(|i| self.time(i)).collect())
    }
}

/// Bookkeeping of the per-step state corrections.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HygieneStats {
    pub steps: usize,
    /// Largest `|Tr ρ − 1|` seen right after an RK4 step.
    pub max_trace_drift: f64,
    /// Largest `‖ρ − ρ†‖_max` seen right after an RK4 step.
    pub max_hermiticity_residual: f64,
    /// Steps whose trace was not exactly 1 before renormalization.
    pub renormalizations: usize,
    /// Smallest eigenvalue among the positivity-checked states.
    pub min_eigenvalue: f64,
    pub positivity_checks: usize,
}

impl HygieneStats {
    fn new() -> Self {
        HygieneStats {
            min_eigenvalue: f64::INFINITY,
            ..Default::default()
        }
    }

    pub fn merge(&mut self, other: &HygieneStats) {
        self.steps += other.steps;
        self.max_trace_drift = self.max_trace_drift.max(other.max_trace_drift);
        self.max_hermiticity_residual = self
            .max_hermiticity_residual
            .max(other.max_hermiticity_residual);
        self.renormalizations += other.renormalizations;
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.positivity_checks += other.positivity_checks;
    }
}

/// One RK4-driven state with hygiene tracking.
pub struct Propagator<'a> {
    equation: &'a MasterEquation,
    dt: f64,
    step: usize,
    state: DensityMatrix,
    stats: HygieneStats,
}

impl<'a> Propagator<'a> {
    pub fn new(equation: &'a MasterEquation, rho0: DensityMatrix, dt: f64) -> Result<Self, Error> {
        if rho0.layout() != &SubsystemLayout::standard() {
            return Err(Error::DimensionMismatch {
                expected: 16,
                found: rho0.dim(),
            });
        }
        Ok(Propagator {
            equation,
            dt,
            step: 0,
            state: rho0,
            stats: HygieneStats::new(),
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn stats(&self) -> &HygieneStats {
        &self.stats
    }

    /// Advances by one step, then symmetrizes and renormalizes.
    pub fn advance(&mut self) -> Result<(), Error> {
        let t = self.time();
        let raw = self.equation.rk4_step(t, self.state.matrix(), self.dt);
        self.step += 1;
        let herm = raw.hermiticity_residual();
        let mut next = raw.hermitian_part();
        let tr = next.trace().re;
        let drift = (tr - 1.0).abs();
        self.stats.steps += 1;
        self.stats.max_hermiticity_residual = self.stats.max_hermiticity_residual.max(herm);
        self.stats.max_trace_drift = self.stats.max_trace_drift.max(drift);
        if !next.is_finite() || !(drift <= ABORT_TRACE_DRIFT) {
            return Err(Error::Integration(IntegrationFailure {
                step: self.step,
                t: self.time(),
                violation: StateViolation::Trace { trace: tr },
            }));
        }
        if drift != 0.0 {
            self.stats.renormalizations += 1;
            log::trace!("step {}: renormalized trace drift {drift:e}", self.step);
            next = next.scale_real(1.0 / tr);
        }
        self.state = DensityMatrix::new_unchecked(next, SubsystemLayout::standard());
        Ok(())
    }

    /// Eigenvalue check of the current state.
    pub fn check_positivity(&mut self) -> Result<f64, Error> {
        let min = min_eigenvalue(self.state.matrix())?;
        self.stats.min_eigenvalue = self.stats.min_eigenvalue.min(min);
        self.stats.positivity_checks += 1;
        if min < ABORT_NEGATIVITY {
            return Err(Error::Integration(IntegrationFailure {
                step: self.step,
                t: self.time(),
                violation: StateViolation::Negativity {
                    min_eigenvalue: min,
                },
            }));
        }
        Ok(min)
    }
}

fn check_step_guard(p: &ModelParams, grid: &GridSpec) -> Result<usize, Error> {
    let n = grid.steps()?;
    if grid.dt * p.max_frequency() > MAX_DT_OMEGA * (1.0 + 1e-12) {
        return Err(Error::InvalidGrid {
            reason: "dt * omega_max exceeds the RK4 stability guard",
        });
    }
    Ok(n)
}

/// What a streaming observer sees at every grid point.
pub struct StepView<'s> {
    pub step: usize,
    pub t: f64,
    /// True on stride points (positivity already checked).
    pub stored: bool,
    pub state: &'s DensityMatrix,
}

/// Integrates one trajectory, calling `observe` at every grid point
/// including `t = 0`. Returns the hygiene statistics.
pub fn integrate_streaming(
    p: &ModelParams,
    rho0: DensityMatrix,
    grid: &GridSpec,
    mut observe: impl FnMut(StepView<'_>),
) -> Result<HygieneStats, Error> {
    let n = check_step_guard(p, grid)?;
    let eq = MasterEquation::new(p);
    let mut prop = Propagator::new(&eq, rho0, grid.dt)?;
    prop.check_positivity()?;
    observe(StepView {
        step: 0,
        t: 0.0,
        stored: true,
        state: prop.state(),
    });
    for i in 1..=n {
        prop.advance()?;
        let stored = i % grid.stride == 0;
        if stored {
            prop.check_positivity()?;
        }
        observe(StepView {
            step: i,
            t: prop.time(),
            stored,
            state: prop.state(),
        });
    }
    Ok(*prop.stats())
}

/// Integrates two initial states in lockstep on the same grid, so their
/// difference carries no stepping noise. `observe(step, t, stored, α, β)`.
pub fn integrate_pair(
    p: &ModelParams,
    alpha0: DensityMatrix,
    beta0: DensityMatrix,
    grid: &GridSpec,
    mut observe: impl FnMut(usize, f64, bool, &DensityMatrix, &DensityMatrix),
) -> Result<HygieneStats, Error> {
    let n = check_step_guard(p, grid)?;
    let eq = MasterEquation::new(p);
    let mut a = Propagator::new(&eq, alpha0, grid.dt)?;
    let mut b = Propagator::new(&eq, beta0, grid.dt)?;
    a.check_positivity()?;
    b.check_positivity()?;
    observe(0, 0.0, true, a.state(), b.state());
    for i in 1..=n {
        a.advance()?;
        b.advance()?;
        let stored = i % grid.stride == 0;
        if stored {
            a.check_positivity()?;
            b.check_positivity()?;
        }
        observe(i, a.time(), stored, a.state(), b.state());
    }
    let mut stats = *a.stats();
    stats.merge(b.stats());
    Ok(stats)
}

/// States on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub stats: HygieneStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Spacing of the stored grid.
    pub fn spacing(&self) -> f64 {
        self.grid.dt * self.grid.stride as f64
    }
}

/// Integrates and keeps every `grid.stride`-th state.
pub fn integrate(
    p: &ModelParams,
    rho0: DensityMatrix,
    grid: &GridSpec,
) -> Result<Trajectory, Error> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let stats = integrate_streaming(p, rho0, grid, |view| {
        if view.stored {
            times.push(view.t);
            states.push(view.state.clone());
        }
    })?;
    Ok(Trajectory {
        grid: *grid,
        times,
        states,
        stats,
    })
}
