//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use qbattery::catalog::catalog;
use qbattery::config::{ChargerState, InitialState, Observable, ScenarioConfig, SigmaPairSpec};
use qbattery::jobs::{run_job, JobOutput, JobPlan};
use qbattery::manifest::RunManifest;
use qbattery::runner::{file_name, run_scenario, RunOptions};
use qbattery_core::dynamics::{integrate_streaming, GridSpec, MasterEquation};
use qbattery_core::linalg::{qubit, CMatrix, Subsystem, C64};
use qbattery_core::model::{
    classify_regime, product_initial_state, virtual_temperature, MachineRegime, ModelParams,
    ParamSet,
};
use qbattery_core::observables::{
    ergotropy, passive_energy, relative_entropy_of_coherence, LogBase,
};
use qbattery_core::DensityMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SCENARIO_BUDGET_S: f64 = 300.0;

/// Criteria that cannot hold for the model as defined; they still print
/// FAIL but do not fail the process. An unexpected pass is reported too.
const EXPECTED_FAILURES: [(u32, &str); 1] = [(
    9,
    "I_M12CB = S(M12)+S(C)+S(B)-S(rho) equals I(M12:CB) + I_CB, so it is never below I_CB",
)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Full catalog runs shared by several criteria.
struct Ctx {
    root: PathBuf,
    runs: Vec<(ScenarioConfig, RunManifest)>,
}

impl Ctx {
    fn dir(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn manifest(&self, name: &str) -> Option<&RunManifest> {
        self.runs
            .iter()
            .find(|(c, _)| c.name == name)
            .map(|(_, m)| m)
    }
}

fn empty() -> CMatrix {
    CMatrix::diag_real(&[1.0, 0.0])
}

fn params(edit: impl FnOnce(&mut ParamSet)) -> ModelParams {
    let mut v = ParamSet::default();
    edit(&mut v);
    ModelParams::new(v).expect("valid parameters")
}

fn job(
    p: &ModelParams,
    initial_state: InitialState,
    sigma_pair: Option<SigmaPairSpec>,
    observables: &[Observable],
) -> JobOutput {
    let plan = JobPlan {
        params: p,
        grid: GridSpec::new(1e-3, 100.0, 10),
        initial_state,
        sigma_pair,
        observables,
        log_base: LogBase::Two,
    };
    run_job(&plan).expect("integration succeeds")
}

/// `(sweep value, [(t, value)])` groups of a long-format table.
fn read_series(path: &Path) -> BTreeMap<String, Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).expect("table exists");
    let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let v: Vec<&str> = line.split(',').collect();
        let t: f64 = v[0].parse().unwrap();
        let x: f64 = v[v.len() - 1].parse().unwrap();
        let key = if v.len() == 3 {
            v[1].to_string()
        } else {
            String::new()
        };
        out.entry(key).or_default().push((t, x));
    }
    out
}

fn c1_physical_states(ctx: &mut Ctx) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for cfg in catalog() {
        let dir = ctx.dir(&cfg.name);
        let started = Instant::now();
        let opts = RunOptions {
            out_dir: dir,
            threads: Some(1),
        };
        let m = match run_scenario(&cfg, &opts) {
            Ok(o) => o.manifest,
            Err(e) => {
                ok = false;
                parts.push(format!("{}: {e}", cfg.name));
                continue;
            }
        };
        let secs = started.elapsed().as_secs_f64();
        let h = &m.hygiene;
        let pass = h.stored_max_trace_error <= 1e-8
            && h.stored_max_hermiticity_residual <= 1e-10
            && h.min_eigenvalue >= -1e-8
            && secs <= SCENARIO_BUDGET_S
            && m.all_passed();
        ok &= pass;
        parts.push(format!(
            "{} {:.0}s tr={:.1e} herm={:.1e} min_eig={:.1e}{}",
            cfg.name,
            secs,
            h.stored_max_trace_error,
            h.stored_max_hermiticity_residual,
            h.min_eigenvalue,
            if m.all_passed() {
                ""
            } else {
                " (run invariant failed)"
            }
        ));
        ctx.runs.push((cfg, m));
    }
    outcome(ok, parts.join("; "))
}

fn c2_closed_conservation(_: &mut Ctx) -> Outcome {
    let p = params(|v| {
        v.gamma1 = 0.0;
        v.gamma2 = 0.0;
    });
    let h0 = MasterEquation::new(&p).operators().h0.clone();
    let mut worst = 0.0f64;
    for charger in [qubit::excited_projector(), qubit::plus_state()] {
        let rho0 = product_initial_state(&p, &charger, &empty()).unwrap();
        let e0 = rho0.expectation(&h0);
        integrate_streaming(&p, rho0, &GridSpec::new(1e-3, 50.0, 10), |v| {
            worst = worst.max((v.state.expectation(&h0) - e0).abs());
        })
        .unwrap();
    }
    outcome(
        worst <= 1e-7,
        format!("max bare-energy drift {worst:.2e} over [0, 50]"),
    )
}

fn c3_rabi_oracle(_: &mut Ctx) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [0.1, 0.3, 0.9] {
        let p = params(|v| {
            v.g = 0.0;
            v.k = k;
        });
        let out = job(
            &p,
            InitialState::ExcitedChargerEmptyBattery,
            None,
            &[Observable::DeltaEB],
        );
        let err = out
            .times
            .iter()
            .zip(&out.series[&Observable::DeltaEB])
            .map(|(t, e)| (e - (k * t).sin().powi(2)).abs())
            .fold(0.0, f64::max);
        ok &= err <= 1e-6;
        parts.push(format!("k={k}: {err:.2e}"));
    }
    outcome(
        ok,
        format!(
            "max |dE_B/w_B - sin^2(kt)| over [0, 100]: {}",
            parts.join(", ")
        ),
    )
}

fn c4_isolation(_: &mut Ctx) -> Outcome {
    let mut rho_dev = 0.0f64;
    let mut sigma_max = 0.0f64;
    for f in [0.0, 0.8] {
        let p = params(|v| {
            v.k = 0.0;
            v.f = f;
        });
        let rho0 = product_initial_state(&p, &qubit::plus_state(), &empty()).unwrap();
        let b0 = rho0.partial_trace(&[Subsystem::B]).unwrap();
        integrate_streaming(&p, rho0, &GridSpec::new(1e-3, 100.0, 10), |v| {
            let b = v.state.partial_trace(&[Subsystem::B]).unwrap();
            rho_dev = rho_dev.max(b.matrix().max_abs_diff(b0.matrix()));
        })
        .unwrap();
        let out = job(
            &p,
            InitialState::PlusChargerEmptyBattery,
            Some(SigmaPairSpec {
                charger: ChargerState::Excited,
            }),
            &[Observable::SigmaB],
        );
        sigma_max = out.series[&Observable::SigmaB]
            .iter()
            .fold(sigma_max, |a, s| a.max(s.abs()));
    }
    outcome(
        rho_dev <= 1e-9 && sigma_max <= 1e-9,
        format!("k=0, f in {{0, 0.8}}: max |rho_B(t) - rho_B(0)| {rho_dev:.2e}, max |sigma_B| {sigma_max:.2e}"),
    )
}

fn c5_virtual_temperature(_: &mut Ctx) -> Outcome {
    let p = ModelParams::default();
    let t_v = virtual_temperature(&p).unwrap();
    let regime = classify_regime(&p, t_v);
    outcome(
        (t_v + 24.0).abs() <= 1e-12 && regime == MachineRegime::HeatPump,
        format!(
            "T_v = {t_v} ({} w_M2), regime {}",
            t_v / p.omega_m2,
            regime.as_str()
        ),
    )
}

fn charger_energy(f: f64) -> JobOutput {
    let p = params(|v| {
        v.g = 0.3;
        v.f = f;
    });
    job(
        &p,
        InitialState::PlusChargerEmptyBattery,
        None,
        &[Observable::DeltaEC],
    )
}

fn c6_charger_recharge(_: &mut Ctx) -> Outcome {
    let out = charger_energy(0.0);
    let late = out
        .times
        .iter()
        .zip(&out.series[&Observable::DeltaEC])
        .filter(|(t, _)| **t > 20.0)
        .fold((f64::NEG_INFINITY, 0.0), |best, (t, e)| {
            if *e > best.0 {
                (*e, *t)
            } else {
                best
            }
        });
    outcome(
        late.0 > 0.0,
        format!(
            "f=0, g=0.3: max dE_C/w_C over t > 20 is {:.3e} at t = {}",
            late.0, late.1
        ),
    )
}

fn mean_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum::<f64>() / v.len() as f64
}

fn c7_energy_retention(_: &mut Ctx) -> Outcome {
    let m0 = mean_abs(&charger_energy(0.0).series[&Observable::DeltaEC]);
    let m8 = mean_abs(&charger_energy(0.8).series[&Observable::DeltaEC]);
    outcome(
        m8 < m0,
        format!("time-average |dE_C/w_C|: f=0.8 {m8:.4e} vs f=0 {m0:.4e}"),
    )
}

fn backflow(f: f64) -> f64 {
    let p = params(|v| {
        v.g = 0.3;
        v.f = f;
    });
    let out = job(
        &p,
        InitialState::ExcitedChargerEmptyBattery,
        Some(SigmaPairSpec {
            charger: ChargerState::Excited,
        }),
        &[Observable::SigmaB],
    );
    let h = out.times[1] - out.times[0];
    let s = &out.series[&Observable::SigmaB];
    s.windows(2)
        .map(|w| 0.5 * h * ((-w[0]).max(0.0) + (-w[1]).max(0.0)))
        .sum()
}

fn c8_drive_non_markovianity(_: &mut Ctx) -> Outcome {
    let n0 = backflow(0.0);
    let n8 = backflow(0.8);
    outcome(
        n8 > n0,
        format!("integral of max(-sigma_B, 0) over [0, 100]: f=0.8 {n8:.5} vs f=0 {n0:.5}"),
    )
}

fn c9_mutual_information(ctx: &mut Ctx) -> Outcome {
    let Some(m) = ctx.manifest("fig3") else {
        return outcome(false, "catalog run of fig3 missing");
    };
    let dir = ctx.dir("fig3");
    let (mut initial, mut min) = (0.0f64, f64::INFINITY);
    let mut ordering = Vec::new();
    for f in m
        .jobs
        .iter()
        .map(|j| j.f)
        .fold(Vec::<f64>::new(), |mut v, f| {
            if !v.contains(&f) {
                v.push(f);
            }
            v
        })
    {
        let cb = read_series(&dir.join(file_name("fig3", f, Observable::MutualInformationCb)));
        let m12 = read_series(&dir.join(file_name("fig3", f, Observable::MutualInformationM12cb)));
        for (g, s) in &cb {
            let t = &m12[g];
            initial = initial.max(s[0].1.abs()).max(t[0].1.abs());
            min = s.iter().chain(t).fold(min, |a, x| a.min(x.1));
            let max_cb = s.iter().fold(f64::NEG_INFINITY, |a, x| a.max(x.1));
            let max_m = t.iter().fold(f64::NEG_INFINITY, |a, x| a.max(x.1));
            ordering.push((f, g.clone(), max_cb, max_m));
        }
    }
    let order_ok = ordering.iter().all(|(_, _, a, b)| a >= b);
    let detail: Vec<String> = ordering
        .iter()
        .map(|(f, g, a, b)| {
            format!(
                "f={f} g={g}: {a:.3}{}{b:.3}",
                if a >= b { ">=" } else { "<" }
            )
        })
        .collect();
    outcome(
        initial <= 1e-9 && min >= -1e-9 && order_ok,
        format!(
            "|I(0)| max {initial:.1e}, min I {min:.1e}; max_t I_CB vs max_t I_M12CB: {}",
            detail.join(", ")
        ),
    )
}

fn random_state(r: &mut StdRng) -> CMatrix {
    let mut a = CMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            a[(i, j)] = C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        }
    }
    let rho = a.matmul(&a.adjoint());
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Haar-random element of SU(2) from a uniform point on the 3-sphere.
fn random_unitary(r: &mut StdRng) -> CMatrix {
    let q = loop {
        let q: [f64; 4] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>();
        if n > 1e-6 && n <= 1.0 {
            let n = n.sqrt();
            break q.map(|x| x / n);
        }
    };
    let mut u = CMatrix::zeros(2);
    u[(0, 0)] = C64::new(q[0], q[1]);
    u[(0, 1)] = C64::new(q[2], q[3]);
    u[(1, 0)] = C64::new(-q[2], q[3]);
    u[(1, 1)] = C64::new(q[0], -q[1]);
    u
}

fn c10_ergotropy(_: &mut Ctx) -> Outcome {
    let omega = 8.0;
    let h = qubit::excited_projector().scale_real(omega);
    let mut r = StdRng::seed_from_u64(10);
    let mut worst_violation = f64::NEG_INFINITY;
    let mut worst_gap = 0.0f64;
    for _ in 0..100 {
        let rho = random_state(&mut r);
        let passive = passive_energy(
            &DensityMatrix::qubit(rho.clone(), Subsystem::B).unwrap(),
            &h,
        )
        .unwrap();
        let mut best = f64::INFINITY;
        for _ in 0..10_000 {
            let u = random_unitary(&mut r);
            let rotated = u.matmul(&rho).matmul(&u.adjoint());
            best = best.min(rotated.matmul(&h).trace().re);
        }
        worst_violation = worst_violation.max(passive - best);
        worst_gap = worst_gap.max(best - passive);
    }
    let q = |m: CMatrix| DensityMatrix::qubit(m, Subsystem::B).unwrap();
    let e_ground = ergotropy(&q(empty()), &h).unwrap();
    let e_excited = ergotropy(&q(qubit::excited_projector()), &h).unwrap();
    outcome(
        worst_violation <= 1e-6 && e_ground.abs() <= 1e-12 && (e_excited - omega).abs() <= 1e-12,
        format!(
            "passive minus best sampled energy max {worst_violation:.2e} (largest sampling gap {worst_gap:.2e}); \
             eps(|0>) = {e_ground:.1e}, eps(|1>) = {e_excited} for w_B = {omega}"
        ),
    )
}

fn c11_coherence(ctx: &mut Ctx) -> Outcome {
    let q = |m: CMatrix| DensityMatrix::qubit(m, Subsystem::B).unwrap();
    let plus = relative_entropy_of_coherence(&q(qubit::plus_state()), LogBase::Two).unwrap();
    let mut diag = 0.0f64;
    for p in [0.0, 0.1, 0.5, 0.73, 1.0] {
        let c = relative_entropy_of_coherence(&q(CMatrix::diag_real(&[p, 1.0 - p])), LogBase::Two)
            .unwrap();
        diag = diag.max(c.abs());
    }
    let mut initial = 0.0f64;
    for cfg in catalog() {
        let p = ModelParams::default();
        let rho0 =
            product_initial_state(&p, &cfg.initial_state.charger().matrix(), &empty()).unwrap();
        let b = rho0.partial_trace(&[Subsystem::B]).unwrap();
        initial = initial.max(
            relative_entropy_of_coherence(&b, LogBase::Two)
                .unwrap()
                .abs(),
        );
    }
    for (cfg, m) in &ctx.runs {
        if cfg.observables.contains(&Observable::CoherenceB) {
            let check = m
                .invariants
                .iter()
                .find(|c| c.name == "coherence_b_initial")
                .unwrap();
            initial = initial.max(check.value);
        }
    }
    outcome(
        (plus - 1.0).abs() <= 1e-10 && diag <= 1e-12 && initial <= 1e-12,
        format!("C(|+>) = {plus}, max C(diagonal) = {diag:.1e}, max C_B(0) over scenarios = {initial:.1e}"),
    )
}

fn end_state(dt: f64) -> CMatrix {
    let cfg = ScenarioConfig::default();
    let p = cfg.resolve().unwrap().jobs[0].params.clone();
    let rho0 = product_initial_state(&p, &cfg.initial_state.charger().matrix(), &empty()).unwrap();
    let steps = (cfg.t_max / dt).round() as usize;
    let mut last = None;
    integrate_streaming(&p, rho0, &GridSpec::new(dt, cfg.t_max, steps), |v| {
        if v.step == steps {
            last = Some(v.state.matrix().clone());
        }
    })
    .unwrap();
    last.unwrap()
}

fn c12_integrator_order(_: &mut Ctx) -> Outcome {
    let dt = 4e-3;
    let coarse = end_state(dt);
    let half = end_state(dt / 2.0);
    let reference = end_state(dt / 4.0);
    let e1 = coarse.max_abs_diff(&reference);
    let e2 = half.max_abs_diff(&reference);
    let ratio = e1 / e2;
    outcome(
        ratio >= 12.0,
        format!("default scenario to t = 100: err(dt={dt}) {e1:.3e}, err(dt/2) {e2:.3e}, ratio {ratio:.2}"),
    )
}

fn digests(m: &RunManifest) -> Vec<(String, String)> {
    m.files
        .iter()
        .map(|f| (f.path.clone(), f.sha256.clone()))
        .collect()
}

fn c13_determinism(ctx: &mut Ctx) -> Outcome {
    let mut ok = !ctx.runs.is_empty();
    let mut parts = Vec::new();
    let scratch = ctx.root.join("repeat");
    for (full, first) in &ctx.runs {
        let density = full.time_columns.is_some();
        // density grids are compared on two fresh shortened runs
        let mut cfg = full.clone();
        let (ref_dir, reference) = if density {
            cfg.t_max = 10.0;
            let opts = RunOptions {
                out_dir: scratch.join(format!("{}_first", cfg.name)),
                threads: Some(1),
            };
            (
                opts.out_dir.clone(),
                run_scenario(&cfg, &opts).map(|o| o.manifest).ok(),
            )
        } else {
            (ctx.dir(&cfg.name), Some(first.clone()))
        };
        let opts = RunOptions {
            out_dir: scratch.join(&cfg.name),
            threads: Some(1),
        };
        let again = run_scenario(&cfg, &opts).map(|o| o.manifest).ok();
        let same = match (&reference, &again) {
            (Some(a), Some(b)) => {
                digests(a) == digests(b)
                    && a.config_sha256 == b.config_sha256
                    && b.files.iter().all(|f| {
                        std::fs::read(opts.out_dir.join(&f.path)).ok()
                            == std::fs::read(ref_dir.join(&f.path)).ok()
                    })
            }
            _ => false,
        };
        ok &= same;
        let span = if density { " (t_max 10)" } else { "" };
        parts.push(format!(
            "{}{span}: {}",
            cfg.name,
            if same { "identical" } else { "differs" }
        ));
    }
    outcome(ok, parts.join(", "))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let mut ctx = Ctx {
        root: tmp.path().to_path_buf(),
        runs: Vec::new(),
    };
    let criteria: [(u32, &str, fn(&mut Ctx) -> Outcome); 13] = [
        (
            1,
            "physical-state invariants on every catalog scenario",
            c1_physical_states,
        ),
        (
            2,
            "closed-system bare-energy conservation",
            c2_closed_conservation,
        ),
        (3, "charger-battery Rabi oracle", c3_rabi_oracle),
        (4, "isolated battery for k = 0", c4_isolation),
        (5, "virtual temperature and regime", c5_virtual_temperature),
        (6, "charger recharged by the machine", c6_charger_recharge),
        (7, "drive retains charger energy", c7_energy_retention),
        (
            8,
            "drive enhances battery backflow",
            c8_drive_non_markovianity,
        ),
        (9, "mutual information properties", c9_mutual_information),
        (10, "ergotropy oracle", c10_ergotropy),
        (11, "coherence benchmarks", c11_coherence),
        (12, "RK4 dt-halving order", c12_integrator_order),
        (13, "byte-identical reruns", c13_determinism),
    ];
    let (mut failed, mut expected_failed, mut unexpected) = (0, 0, 0);
    for (n, title, f) in criteria {
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| f(&mut ctx))).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let expected = EXPECTED_FAILURES
            .iter()
            .find(|(k, _)| *k == n)
            .map(|(_, why)| *why);
        let note = match (result.passed, expected) {
            (false, Some(why)) => {
                expected_failed += 1;
                format!(" [expected failure: {why}]")
            }
            (true, Some(_)) => {
                unexpected += 1;
                " [unexpected pass: listed as an expected failure]".to_string()
            }
            (false, None) => {
                unexpected += 1;
                String::new()
            }
            (true, None) => String::new(),
        };
        if !result.passed {
            failed += 1;
        }
        println!(
            "{} criterion {n:>2} {title} [{:.1}s]: {}{note}",
            if result.passed { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64(),
            result.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed ({expected_failed} expected)",
        13 - failed
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
