//! Integration of a single job and evaluation of its observables.

use std::collections::BTreeMap;

use qbattery_core::dynamics::{integrate_pair, integrate_streaming, GridSpec, HygieneStats};
use qbattery_core::linalg::{qubit, CMatrix, Subsystem};
use qbattery_core::model::{product_initial_state, ModelParams};
use qbattery_core::observables::{
    ergotropy, finite_difference, mutual_information_cb, mutual_information_m12cb, power_at,
    relative_entropy_of_coherence, subsystem_energy, trace_distance, LogBase,
};
use qbattery_core::{DensityMatrix, Error};

use crate::config::{InitialState, Observable, SigmaPairSpec};

/// What one job needs to know.
pub struct JobPlan<'a> {
    pub params: &'a ModelParams,
    pub grid: GridSpec,
    pub initial_state: InitialState,
    pub sigma_pair: Option<SigmaPairSpec>,
    pub observables: &'a [Observable],
    pub log_base: LogBase,
}

/// Series on the stored grid, keyed by observable.
#[derive(Debug, Clone)]
pub struct JobOutput {
    pub times: Vec<f64>,
    pub series: BTreeMap<Observable, Vec<f64>>,
    pub stats: HygieneStats,
    /// Largest `|Tr ρ − 1|` over stored states.
    pub stored_trace_error: f64,
    /// Largest `‖ρ − ρ†‖_max` over stored states.
    pub stored_hermiticity: f64,
    /// Largest `ε_B/ω_B − E_B/ω_B` (should stay ≤ 0).
    pub ergotropy_excess: f64,
}

fn empty_battery() -> CMatrix {
    CMatrix::diag_real(&[1.0, 0.0])
}

/// Per-stored-state quantities of the main trajectory.
struct Recorder<'a> {
    plan: &'a JobPlan<'a>,
    h_b: CMatrix,
    e_c: Vec<f64>,
    e_b: Vec<f64>,
    e_m: Vec<(f64, f64)>,
    columns: BTreeMap<Observable, Vec<f64>>,
    ergotropy_excess: f64,
}

impl<'a> Recorder<'a> {
    fn new(plan: &'a JobPlan<'a>) -> Self {
        Recorder {
            plan,
            h_b: qubit::excited_projector().scale_real(plan.params.omega_b),
            e_c: Vec::new(),
            e_b: Vec::new(),
            e_m: Vec::new(),
            columns: BTreeMap::new(),
            ergotropy_excess: f64::NEG_INFINITY,
        }
    }

    fn wants(&self, o: Observable) -> bool {
        self.plan.observables.contains(&o)
    }

    fn push(&mut self, o: Observable, v: f64) {
        self.columns.entry(o).or_default().push(v);
    }

    fn record(&mut self, state: &DensityMatrix) -> Result<(), Error> {
        use Observable::*;
        let p = self.plan.params;
        let base = self.plan.log_base;
        if self.wants(DeltaEC) {
            self.e_c
                .push(subsystem_energy(state, Subsystem::C, p.omega_c)?);
        }
        let wants_b = self.wants(DeltaEB) || self.wants(PowerB) || self.wants(ErgotropyB);
        let e_b = if wants_b {
            let e = subsystem_energy(state, Subsystem::B, p.omega_b)?;
            self.e_b.push(e);
            e
        } else {
            0.0
        };
        if self.wants(DeltaEM12) {
            self.e_m.push((
                subsystem_energy(state, Subsystem::M1, p.omega_m1)?,
                subsystem_energy(state, Subsystem::M2, p.omega_m2)?,
            ));
        }
        if self.wants(MutualInformationCb) {
            self.push(MutualInformationCb, mutual_information_cb(state, base)?);
        }
        if self.wants(MutualInformationM12cb) {
            self.push(
                MutualInformationM12cb,
                mutual_information_m12cb(state, base)?,
            );
        }
        if self.wants(CoherenceC) {
            let rho_c = state.partial_trace(&[Subsystem::C])?;
            self.push(CoherenceC, relative_entropy_of_coherence(&rho_c, base)?);
        }
        if self.wants(CoherenceB) || self.wants(ErgotropyB) {
            let rho_b = state.partial_trace(&[Subsystem::B])?;
            if self.wants(CoherenceB) {
                self.push(CoherenceB, relative_entropy_of_coherence(&rho_b, base)?);
            }
            if self.wants(ErgotropyB) {
                let eps = ergotropy(&rho_b, &self.h_b)? / p.omega_b;
                self.ergotropy_excess = self.ergotropy_excess.max(eps - e_b / p.omega_b);
                self.push(ErgotropyB, eps);
            }
        }
        Ok(())
    }

    fn finish(mut self, times: &[f64]) -> (BTreeMap<Observable, Vec<f64>>, f64) {
        use Observable::*;
        let p = self.plan.params;
        let delta = |v: &[f64], omega: f64| -> Vec<f64> {
            let v0 = v.first().copied().unwrap_or(0.0);
            v.iter().map(|x| (x - v0) / omega).collect()
        };
        if self.wants(DeltaEC) {
            self.columns.insert(DeltaEC, delta(&self.e_c, p.omega_c));
        }
        let de_b = delta(&self.e_b, p.omega_b);
        if self.wants(PowerB) {
            let power = times
                .iter()
                .zip(&de_b)
                .map(|(&t, &e)| power_at(t, e))
                .collect();
            self.columns.insert(PowerB, power);
        }
        if self.wants(DeltaEB) {
            self.columns.insert(DeltaEB, de_b);
        }
        if self.wants(DeltaEM12) {
            let (m1, m2) = self.e_m.first().copied().unwrap_or((0.0, 0.0));
            let v = self
                .e_m
                .iter()
                .map(|(a, b)| (a - m1) / p.omega_m1 + (b - m2) / p.omega_m2)
                .collect();
            self.columns.insert(DeltaEM12, v);
        }
        (self.columns, self.ergotropy_excess)
    }
}

#[derive(Default)]
struct StoredHygiene {
    trace: f64,
    hermiticity: f64,
}

impl StoredHygiene {
    fn observe(&mut self, s: &DensityMatrix) {
        self.trace = self.trace.max((s.matrix().trace().re - 1.0).abs());
        self.hermiticity = self.hermiticity.max(s.matrix().hermiticity_residual());
    }
}

/// Runs one job to completion.
pub fn run_job(plan: &JobPlan<'_>) -> Result<JobOutput, Error> {
    let p = plan.params;
    let grid = plan.grid;
    let main0 = product_initial_state(p, &plan.initial_state.charger().matrix(), &empty_battery())?;
    let sigma_obs: Vec<Observable> = plan
        .observables
        .iter()
        .copied()
        .filter(|o| o.is_sigma())
        .collect();
    let needs_main = plan.observables.iter().any(|o| !o.is_sigma());

    let mut recorder = Recorder::new(plan);
    let mut hygiene = StoredHygiene::default();
    let mut times = Vec::new();
    let mut failure: Option<Error> = None;
    let mut stats;
    let mut distances: Vec<Vec<f64>> = vec![Vec::new(); sigma_obs.len()];

    let pair = if sigma_obs.is_empty() {
        None
    } else {
        plan.sigma_pair
    };
    let alpha_is_main = pair.map(|s| s.charger) == Some(plan.initial_state.charger());

    if let Some(spec) = pair {
        let charger = spec.charger.matrix();
        let alpha = product_initial_state(p, &charger, &empty_battery())?;
        let beta = product_initial_state(p, &charger, &qubit::excited_projector())?;
        stats = integrate_pair(p, alpha, beta, &grid, |_, t, stored, a, b| {
            if failure.is_some() {
                return;
            }
            for (o, d) in sigma_obs.iter().zip(distances.iter_mut()) {
                let sub = o.sigma_subsystem().expect("sigma observable");
                match trace_distance(a, b, sub) {
                    Ok(x) => d.push(x),
                    Err(e) => failure = Some(e),
                }
            }
            if stored {
                hygiene.observe(a);
                hygiene.observe(b);
                times.push(t);
                if alpha_is_main && needs_main {
                    if let Err(e) = recorder.record(a) {
                        failure = Some(e);
                    }
                }
            }
        })?;
        if needs_main && !alpha_is_main {
            let s = integrate_streaming(p, main0, &grid, |v| {
                if v.stored && failure.is_none() {
                    hygiene.observe(v.state);
                    if let Err(e) = recorder.record(v.state) {
                        failure = Some(e);
                    }
                }
            })?;
            stats.merge(&s);
        }
    } else {
        stats = integrate_streaming(p, main0, &grid, |v| {
            if v.stored && failure.is_none() {
                hygiene.observe(v.state);
                times.push(v.t);
                if let Err(e) = recorder.record(v.state) {
                    failure = Some(e);
                }
            }
        })?;
    }
    if let Some(e) = failure {
        return Err(e);
    }

    let (mut series, ergotropy_excess) = recorder.finish(&times);
    for (o, d) in sigma_obs.iter().zip(&distances) {
        let sigma = finite_difference(d, grid.dt);
        series.insert(*o, sigma.into_iter().step_by(grid.stride).collect());
    }
    Ok(JobOutput {
        times,
        series,
        stats,
        stored_trace_error: hygiene.trace,
        stored_hermiticity: hygiene.hermiticity,
        ergotropy_excess,
    })
}
