//! Fast numerical health check against closed-form references.

use std::time::Instant;

use qbattery_core::dynamics::{integrate_streaming, lindblad_rhs, GridSpec, MasterEquation};
use qbattery_core::linalg::{qubit, CMatrix, Subsystem};
use qbattery_core::model::{
    classify_regime, product_initial_state, verify_conservation_commutators, virtual_temperature,
    MachineRegime, ModelParams, ParamSet,
};
use qbattery_core::observables::{
    ergotropy, relative_entropy_of_coherence, subsystem_energy, LogBase,
};
use qbattery_core::{DensityMatrix, Error, HERMITICITY_TOL, NEGATIVITY_TOL, TRACE_TOL};
use serde::{Deserialize, Serialize};

use crate::manifest::InvariantCheck;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfCheckReport {
    pub checks: Vec<InvariantCheck>,
    pub wall_time_s: f64,
}

impl SelfCheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn empty() -> CMatrix {
    CMatrix::diag_real(&[1.0, 0.0])
}

fn closed(k: f64, g: f64) -> Result<ModelParams, Error> {
    ModelParams::new(ParamSet {
        gamma1: 0.0,
        gamma2: 0.0,
        k,
        g,
        ..ParamSet::default()
    })
}

fn thermodynamics(checks: &mut Vec<InvariantCheck>) -> Result<(), Error> {
    let p = ModelParams::default();
    let t_v = virtual_temperature(&p)?;
    checks.push(InvariantCheck::at_most(
        "virtual_temperature",
        (t_v + 24.0).abs(),
        1e-12,
        "T_v = -24 at the reference parameters",
    ));
    let pump = classify_regime(&p, t_v) == MachineRegime::HeatPump;
    checks.push(InvariantCheck::at_least(
        "heat_pump_regime",
        pump as u8 as f64,
        1.0,
        "negative T_v classifies as heat pump",
    ));
    let p = p.with(|v| v.f = 0.8)?;
    let mut worst = 0.0f64;
    for t in [0.0, 0.37, 5.0, 41.3] {
        let r = verify_conservation_commutators(&p, t);
        worst = worst
            .max(r.h0_machine_coupling)
            .max(r.h0_charger_battery)
            .max(r.drive_residual);
    }
    checks.push(InvariantCheck::at_most(
        "conservation_commutators",
        worst,
        1e-12,
        "[H0, couplings] and drive commutator residual",
    ));
    Ok(())
}

fn generator(checks: &mut Vec<InvariantCheck>) -> Result<(), Error> {
    let p = ModelParams::new(ParamSet {
        f: 0.8,
        tau: 3.0,
        ..ParamSet::default()
    })?;
    let eq = MasterEquation::new(&p);
    let rho = product_initial_state(&p, &qubit::plus_state(), &qubit::plus_state())?;
    let mut worst = 0.0f64;
    for t in [0.0, 1.3, 2.9, 4.0] {
        let fast = eq.rhs(t, rho.matrix());
        let reference = lindblad_rhs(&p, eq.operators(), t, rho.matrix());
        worst = worst.max(fast.max_abs_diff(&reference));
    }
    checks.push(InvariantCheck::at_most(
        "generator_matches_reference",
        worst,
        1e-12,
        "sparse vs dense Lindblad generator",
    ));
    Ok(())
}

fn closed_dynamics(checks: &mut Vec<InvariantCheck>) -> Result<(), Error> {
    let p = closed(0.3, 0.3)?;
    let rho0 = product_initial_state(&p, &qubit::excited_projector(), &empty())?;
    let h0 = MasterEquation::new(&p).operators().h0.clone();
    let e0 = rho0.expectation(&h0);
    let mut drift = 0.0f64;
    integrate_streaming(&p, rho0, &GridSpec::new(1e-3, 50.0, 100), |v| {
        if v.stored {
            drift = drift.max((v.state.expectation(&h0) - e0).abs());
        }
    })?;
    checks.push(InvariantCheck::at_most(
        "closed_energy_drift",
        drift,
        1e-7,
        "gamma = 0, f = 0 over [0, 50]",
    ));

    let k = 0.3;
    let p = closed(k, 0.0)?;
    let rho0 = product_initial_state(&p, &qubit::excited_projector(), &empty())?;
    let mut err = 0.0f64;
    let mut failure = None;
    integrate_streaming(&p, rho0, &GridSpec::new(1e-3, 20.0, 100), |v| {
        if v.stored {
            match subsystem_energy(v.state, Subsystem::B, p.omega_b) {
                Ok(e) => err = err.max((e / p.omega_b - (k * v.t).sin().powi(2)).abs()),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    checks.push(InvariantCheck::at_most(
        "rabi_oracle",
        err,
        1e-6,
        "E_B/omega_B vs sin^2(kt)",
    ));
    Ok(())
}

fn isolation_and_hygiene(checks: &mut Vec<InvariantCheck>) -> Result<(), Error> {
    let p = ModelParams::default().with(|v| {
        v.k = 0.0;
        v.f = 0.8;
    })?;
    let rho0 = product_initial_state(&p, &qubit::excited_projector(), &qubit::plus_state())?;
    let mut worst = 0.0f64;
    let mut failure = None;
    integrate_streaming(&p, rho0, &GridSpec::new(1e-3, 10.0, 100), |v| {
        if v.stored {
            match v.state.partial_trace(&[Subsystem::B]) {
                Ok(b) => worst = worst.max((b.matrix()[(1, 1)].re - 0.5).abs()),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    checks.push(InvariantCheck::at_most(
        "uncoupled_battery_frozen",
        worst,
        1e-9,
        "k = 0 battery population",
    ));

    let p = ModelParams::default().with(|v| v.f = 0.8)?;
    let rho0 = product_initial_state(&p, &qubit::plus_state(), &empty())?;
    let (mut trace, mut herm) = (0.0f64, 0.0f64);
    let stats = integrate_streaming(&p, rho0, &GridSpec::new(1e-3, 10.0, 10), |v| {
        if v.stored {
            trace = trace.max((v.state.matrix().trace().re - 1.0).abs());
            herm = herm.max(v.state.matrix().hermiticity_residual());
        }
    })?;
    checks.push(InvariantCheck::at_most(
        "run_trace",
        trace,
        TRACE_TOL,
        "driven open run over [0, 10]",
    ));
    checks.push(InvariantCheck::at_most(
        "run_hermiticity",
        herm,
        HERMITICITY_TOL,
        "driven open run over [0, 10]",
    ));
    checks.push(InvariantCheck::at_least(
        "run_positivity",
        stats.min_eigenvalue,
        NEGATIVITY_TOL,
        "driven open run over [0, 10]",
    ));
    Ok(())
}

fn references(checks: &mut Vec<InvariantCheck>) -> Result<(), Error> {
    let omega = 8.0;
    let h = qubit::excited_projector().scale_real(omega);
    let q = |m: CMatrix| DensityMatrix::qubit(m, Subsystem::B);
    let mut err = 0.0f64;
    err = err.max((ergotropy(&q(qubit::excited_projector())?, &h)? - omega).abs());
    err = err.max((ergotropy(&q(qubit::plus_state())?, &h)? - omega / 2.0).abs());
    err = err.max(ergotropy(&q(CMatrix::diag_real(&[0.7, 0.3]))?, &h)?.abs());
    err = err.max((ergotropy(&q(CMatrix::diag_real(&[0.3, 0.7]))?, &h)? - 0.4 * omega).abs());
    checks.push(InvariantCheck::at_most(
        "ergotropy_references",
        err,
        1e-12,
        "excited, plus and diagonal states",
    ));
    let mut err = 0.0f64;
    err = err
        .max((relative_entropy_of_coherence(&q(qubit::plus_state())?, LogBase::Two)? - 1.0).abs());
    err = err.max(
        (relative_entropy_of_coherence(&q(qubit::plus_state())?, LogBase::E)? - 2f64.ln()).abs(),
    );
    err = err.max(
        relative_entropy_of_coherence(&q(CMatrix::diag_real(&[0.6, 0.4]))?, LogBase::Two)?.abs(),
    );
    checks.push(InvariantCheck::at_most(
        "coherence_references",
        err,
        1e-12,
        "plus state and diagonal state",
    ));
    Ok(())
}

/// Runs every check; an integration error is reported as a failed check.
pub fn self_check() -> SelfCheckReport {
    let started = Instant::now();
    let mut checks = Vec::new();
    let stages: [(&str, fn(&mut Vec<InvariantCheck>) -> Result<(), Error>); 5] = [
        ("thermodynamics", thermodynamics),
        ("generator", generator),
        ("closed_dynamics", closed_dynamics),
        ("isolation_and_hygiene", isolation_and_hygiene),
        ("references", references),
    ];
    for (name, stage) in stages {
        if let Err(e) = stage(&mut checks) {
            checks.push(InvariantCheck {
                name: name.into(),
                passed: false,
                value: f64::NAN,
                threshold: f64::NAN,
                detail: e.to_string(),
            });
        }
    }
    SelfCheckReport {
        checks,
        wall_time_s: started.elapsed().as_secs_f64(),
    }
}
