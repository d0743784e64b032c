mod common;

use common::*;
use qbattery_core::dynamics::{
    integrate, integrate_streaming, lindblad_rhs, GridSpec, MasterEquation,
};
use qbattery_core::linalg::{partial_trace, qubit, CMatrix, Subsystem, SubsystemLayout, C64};
use qbattery_core::model::{product_initial_state, ModelParams, ParamSet};
use qbattery_core::observables::subsystem_energy;
use rand::Rng;

fn closed(k: f64, g: f64, f: f64) -> ModelParams {
    ModelParams::new(ParamSet {
        gamma1: 0.0,
        gamma2: 0.0,
        k,
        g,
        f,
        ..ParamSet::default()
    })
    .unwrap()
}

fn random_unit_trace_hermitian(r: &mut rand::rngs::StdRng) -> CMatrix {
    let h = random_hermitian(16, r);
    let shift = (1.0 - h.trace().re) / 16.0;
    &h + &CMatrix::identity(16).scale_real(shift)
}

#[test]
fn fast_generator_matches_reference_form() {
    let mut r = rng(21);
    for f in [0.0, 0.8] {
        for tau in [f64::INFINITY, 3.0] {
            let p = ModelParams::new(ParamSet {
                f,
                tau,
                ..ParamSet::default()
            })
            .unwrap();
            let eq = MasterEquation::new(&p);
            for _ in 0..25 {
                let rho = random_unit_trace_hermitian(&mut r);
                let t = r.gen_range(0.0..6.0);
                let fast = eq.rhs(t, &rho);
                let slow = lindblad_rhs(&p, eq.operators(), t, &rho);
                assert!(fast.max_abs_diff(&slow) <= 1e-12, "f={f} tau={tau} t={t}");
            }
        }
    }
}

#[test]
fn generator_is_traceless_and_hermiticity_preserving() {
    let mut r = rng(22);
    let p = ModelParams::default().with(|v| v.f = 0.8).unwrap();
    let eq = MasterEquation::new(&p);
    for _ in 0..100 {
        let rho = random_unit_trace_hermitian(&mut r);
        let t = r.gen_range(0.0..100.0);
        let d = eq.rhs(t, &rho);
        assert!(d.trace().norm() <= 1e-12);
        assert!(d.hermiticity_residual() <= 1e-12);
        let reference = lindblad_rhs(&p, eq.operators(), t, &rho);
        assert!(reference.trace().norm() <= 1e-12);
    }
}

#[test]
fn closed_charger_battery_rabi_oscillation() {
    let k = 0.3;
    let p = closed(k, 0.0, 0.0);
    let rho0 = product_initial_state(
        &p,
        &qubit::excited_projector(),
        &CMatrix::diag_real(&[1.0, 0.0]),
    )
    .unwrap();
    let traj = integrate(&p, rho0, &GridSpec::new(1e-3, 20.0, 100)).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let e = subsystem_energy(s, Subsystem::B, p.omega_b).unwrap() / p.omega_b;
        let exact = (k * t).sin().powi(2);
        assert!((e - exact).abs() <= 1e-6, "t={t}: {e} vs {exact}");
    }
}

#[test]
fn uncoupled_battery_is_frozen() {
    let p = ModelParams::default()
        .with(|v| {
            v.k = 0.0;
            v.f = 0.8;
        })
        .unwrap();
    let battery = qubit::plus_state();
    let rho0 = product_initial_state(&p, &qubit::excited_projector(), &battery).unwrap();
    let l = SubsystemLayout::standard();
    let mut worst = 0.0f64;
    let mut frame_free = 0.0f64;
    integrate_streaming(&p, rho0, &GridSpec::new(1e-3, 10.0, 100), |v| {
        let (b, _) = partial_trace(v.state.matrix(), &l, &[Subsystem::B]).unwrap();
        // populations are frozen; coherences rotate at ω_B
        worst = worst.max((b[(1, 1)].re - 0.5).abs());
        let rotated = C64::from_polar(0.5, -p.omega_b * v.t);
        frame_free = frame_free.max((b[(1, 0)] - rotated).norm());
    })
    .unwrap();
    assert!(worst <= 1e-9, "{worst}");
    assert!(frame_free <= 1e-6, "{frame_free}");
}

#[test]
fn closed_system_conserves_bare_energy() {
    let p = closed(0.3, 0.3, 0.0);
    let rho0 = product_initial_state(
        &p,
        &qubit::excited_projector(),
        &CMatrix::diag_real(&[1.0, 0.0]),
    )
    .unwrap();
    let eq = MasterEquation::new(&p);
    let h0 = eq.operators().h0.clone();
    let e0 = rho0.expectation(&h0);
    let mut drift = 0.0f64;
    integrate_streaming(&p, rho0, &GridSpec::new(1e-3, 20.0, 100), |v| {
        drift = drift.max((v.state.expectation(&h0) - e0).abs());
    })
    .unwrap();
    assert!(drift <= 1e-7, "{drift}");
}

#[test]
fn drive_injects_work_at_the_commutator_rate() {
    let p = closed(0.3, 0.3, 0.8);
    let rho0 =
        product_initial_state(&p, &qubit::plus_state(), &CMatrix::diag_real(&[1.0, 0.0])).unwrap();
    let eq = MasterEquation::new(&p);
    let h0 = eq.operators().h0.clone();
    let dt = 1e-3;
    let mut energy = Vec::new();
    let mut predicted = Vec::new();
    integrate_streaming(&p, rho0, &GridSpec::new(dt, 2.0, 1), |v| {
        energy.push(v.state.expectation(&h0));
        // d⟨H₀⟩/dt = −i Tr([H₀, ΔH_F(t)] ρ)
        let c = h0.commutator(&eq.operators().drive(v.t));
        predicted.push((c.matmul(v.state.matrix()).trace() * C64::new(0.0, -1.0)).re);
    })
    .unwrap();
    let mut worst = 0.0f64;
    for i in 1..energy.len() - 1 {
        let fd = (energy[i + 1] - energy[i - 1]) / (2.0 * dt);
        worst = worst.max((fd - predicted[i]).abs());
    }
    // central-difference truncation ~ dt²/6 · |d³E/dt³| with |d³E/dt³| ≲ fω³
    assert!(worst <= 5e-4, "{worst}");
    assert!(predicted.iter().any(|x| x.abs() > 1e-2));
}

fn final_state(p: &ModelParams, dt: f64, t_max: f64) -> CMatrix {
    let rho0 =
        product_initial_state(p, &qubit::plus_state(), &CMatrix::diag_real(&[1.0, 0.0])).unwrap();
    let n = (t_max / dt).round() as usize;
    let traj = integrate(p, rho0, &GridSpec::new(dt, t_max, n)).unwrap();
    traj.states.last().unwrap().matrix().clone()
}

#[test]
fn rk4_converges_at_fourth_order() {
    let p = ModelParams::default().with(|v| v.f = 0.8).unwrap();
    let dt = 4e-3;
    let a = final_state(&p, dt, 10.0);
    let b = final_state(&p, dt / 2.0, 10.0);
    let c = final_state(&p, dt / 4.0, 10.0);
    let ratio = a.max_abs_diff(&b) / b.max_abs_diff(&c);
    assert!(ratio >= 12.0, "self-convergence ratio {ratio}");
}

#[test]
fn trajectories_are_bitwise_reproducible() {
    let p = ModelParams::default().with(|v| v.f = 0.8).unwrap();
    let grid = GridSpec::new(1e-3, 2.0, 50);
    let run = || {
        let rho0 = product_initial_state(
            &p,
            &qubit::excited_projector(),
            &CMatrix::diag_real(&[1.0, 0.0]),
        )
        .unwrap();
        integrate(&p, rho0, &grid).unwrap()
    };
    let (x, y) = (run(), run());
    assert_eq!(x.times, y.times);
    for (a, b) in x.states.iter().zip(&y.states) {
        assert_eq!(a.matrix().as_slice(), b.matrix().as_slice());
    }
}

#[test]
fn open_dynamics_keep_states_physical() {
    let p = ModelParams::default().with(|v| v.f = 0.8).unwrap();
    let rho0 =
        product_initial_state(&p, &qubit::plus_state(), &CMatrix::diag_real(&[1.0, 0.0])).unwrap();
    let traj = integrate(&p, rho0, &GridSpec::new(1e-3, 20.0, 200)).unwrap();
    for s in &traj.states {
        assert!((s.matrix().trace().re - 1.0).abs() <= 1e-10);
        assert!(s.matrix().hermiticity_residual() <= 1e-12);
    }
    assert!(traj.stats.min_eigenvalue >= -1e-9);
    assert!(traj.stats.max_trace_drift <= 1e-10);
    assert_eq!(traj.stats.steps, 20_000);
}

#[test]
fn switched_off_interactions_freeze_local_energies() {
    let tau = 5.0;
    let p = ModelParams::default()
        .with(|v| {
            v.tau = tau;
            v.f = 0.8;
        })
        .unwrap();
    let rho0 = product_initial_state(
        &p,
        &qubit::excited_projector(),
        &CMatrix::diag_real(&[1.0, 0.0]),
    )
    .unwrap();
    let traj = integrate(&p, rho0, &GridSpec::new(1e-3, 10.0, 100)).unwrap();
    let energies: Vec<[f64; 4]> = traj
        .states
        .iter()
        .map(|s| {
            let mut e = [0.0; 4];
            for (i, slot) in Subsystem::ALL.iter().enumerate() {
                e[i] = subsystem_energy(s, *slot, 1.0).unwrap();
            }
            e
        })
        .collect();
    // grid point t = 5.1 is the first strictly after τ
    let after: Vec<_> = traj
        .times
        .iter()
        .zip(&energies)
        .filter(|(t, _)| **t > tau + 0.05)
        .map(|(_, e)| *e)
        .collect();
    for e in &after {
        for i in 0..4 {
            assert!((e[i] - after[0][i]).abs() <= 1e-9);
        }
    }
    assert!((energies[10][3] - energies[0][3]).abs() > 1e-4);
}
