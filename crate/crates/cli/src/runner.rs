//! Scenario execution: parallel jobs, deterministic output, manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qbattery_core::dynamics::{ABORT_NEGATIVITY, ABORT_TRACE_DRIFT, MAX_DT_OMEGA};
use qbattery_core::{HERMITICITY_TOL, NEGATIVITY_TOL, TRACE_TOL};
use rayon::prelude::*;

use crate::config::{Observable, ResolvedScenario, ScenarioConfig};
use crate::error::RunError;
use crate::jobs::{run_job, JobOutput, JobPlan};
use crate::manifest::{
    FileRecord, HygieneRecord, IntegratorInfo, InvariantCheck, JobRecord, RunManifest,
};
use crate::output::{sha256_hex, CsvTable};

/// Numerical slack of the information-theoretic bounds.
pub const INFO_TOL: f64 = 1e-9;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory receiving the CSV files and the manifest.
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses all cores.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

/// Job results of a resolved scenario, in job order.
pub fn run_jobs(
    resolved: &ResolvedScenario,
    threads: Option<usize>,
) -> Result<(Vec<JobOutput>, usize), RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Io(std::io::Error::other(e.to_string())))?;
    let used = pool.current_num_threads();
    let log_base = resolved.log_base();
    let cfg = &resolved.config;
    let results: Vec<Result<JobOutput, qbattery_core::Error>> = pool.install(|| {
        resolved
            .jobs
            .par_iter()
            .map(|job| {
                let plan = JobPlan {
                    params: &job.params,
                    grid: resolved.grid,
                    initial_state: cfg.initial_state,
                    sigma_pair: cfg.sigma_pair,
                    observables: &cfg.observables,
                    log_base,
                };
                let out = run_job(&plan);
                log::debug!(
                    "{}: {}",
                    job.label(resolved.sweep_parameter()),
                    if out.is_ok() { "done" } else { "failed" }
                );
                out
            })
            .collect()
    });
    let mut outputs = Vec::with_capacity(results.len());
    for (job, r) in resolved.jobs.iter().zip(results) {
        match r {
            Ok(o) => outputs.push(o),
            Err(source) => {
                return Err(RunError::Integration {
                    job: job.label(resolved.sweep_parameter()),
                    source,
                })
            }
        }
    }
    Ok((outputs, used))
}

/// File name of one (drive variant, observable) table.
pub fn file_name(scenario: &str, f: f64, o: Observable) -> String {
    format!("{scenario}_f{f:?}_{}.csv", o.name())
}

fn write_tables(
    resolved: &ResolvedScenario,
    outputs: &[JobOutput],
    config_sha: &str,
    dir: &Path,
) -> Result<Vec<FileRecord>, RunError> {
    let cfg = &resolved.config;
    let base = resolved.log_base();
    let sweep = resolved.sweep_parameter();
    let mut files = Vec::new();
    for (variant, &f) in resolved.f_values.iter().enumerate() {
        for &o in &cfg.observables {
            let comments = vec![
                format!("scenario: {} ({})", cfg.name, cfg.description),
                format!("config_sha256: {config_sha}"),
                format!("drive amplitude f = {f:?}"),
                format!("{} [{}]: {}", o.name(), o.unit(base), o.description()),
            ];
            let mut header = vec!["t [time]".to_string()];
            if let Some(s) = sweep {
                header.push(format!("{} [energy]", s.name()));
            }
            header.push(format!("{} [{}]", o.name(), o.unit(base)));
            let mut table = CsvTable::new(&comments, &header);
            for (idx, job) in resolved.variant_jobs(variant) {
                let out = &outputs[idx];
                let values = &out.series[&o];
                for (t, v) in out.times.iter().zip(values) {
                    match job.sweep_value {
                        Some(s) => table.row(&[*t, s, *v]),
                        None => table.row(&[*t, *v]),
                    }
                }
            }
            files.push(table.write(dir, &file_name(&cfg.name, f, o))?);
        }
    }
    Ok(files)
}

fn series_fold(
    outputs: &[JobOutput],
    o: Observable,
    init: f64,
    f: impl Fn(f64, f64) -> f64,
) -> f64 {
    outputs
        .iter()
        .filter_map(|out| out.series.get(&o))
        .flatten()
        .fold(init, |a, &b| f(a, b))
}

fn initial_abs(outputs: &[JobOutput], o: Observable) -> f64 {
    outputs
        .iter()
        .filter_map(|out| out.series.get(&o).and_then(|v| v.first()))
        .fold(0.0, |a: f64, b| a.max(b.abs()))
}

fn invariants(
    resolved: &ResolvedScenario,
    outputs: &[JobOutput],
    hygiene: &HygieneRecord,
    files: &[FileRecord],
) -> Vec<InvariantCheck> {
    use Observable::*;
    let cfg = &resolved.config;
    let mut checks = vec![
        InvariantCheck::at_most(
            "trace",
            hygiene.stored_max_trace_error,
            TRACE_TOL,
            "max |Tr rho - 1| over stored states",
        ),
        InvariantCheck::at_most(
            "hermiticity",
            hygiene.stored_max_hermiticity_residual,
            HERMITICITY_TOL,
            "max |rho - rho^dagger| over stored states",
        ),
        InvariantCheck::at_least(
            "positivity",
            hygiene.min_eigenvalue,
            NEGATIVITY_TOL,
            "min eigenvalue over stored states",
        ),
    ];
    let finite = outputs
        .iter()
        .flat_map(|o| o.series.values().flatten())
        .filter(|v| !v.is_finite())
        .count();
    checks.push(InvariantCheck::at_most(
        "finite_values",
        finite as f64,
        0.0,
        "non-finite samples",
    ));
    for file in files {
        let per_variant = resolved.jobs.len() / resolved.f_values.len();
        let expected = per_variant * resolved.stored_points();
        checks.push(InvariantCheck {
            name: format!("rows:{}", file.path),
            passed: file.rows == expected,
            value: file.rows as f64,
            threshold: expected as f64,
            detail: "data rows equal sweep points times stored times".into(),
        });
    }
    let has = |o| cfg.observables.contains(&o);
    for o in [MutualInformationCb, MutualInformationM12cb] {
        if has(o) {
            let min = series_fold(outputs, o, f64::INFINITY, f64::min);
            checks.push(InvariantCheck::at_least(
                &format!("{}_nonnegative", o.name()),
                min,
                -INFO_TOL,
                "min over all samples",
            ));
            checks.push(InvariantCheck::at_most(
                &format!("{}_initial", o.name()),
                initial_abs(outputs, o),
                INFO_TOL,
                "initial product state carries no correlations",
            ));
        }
    }
    // qubit coherence lies in [0, log 2]
    let c_max = resolved.log_base().log(2.0);
    for o in [CoherenceC, CoherenceB] {
        if has(o) {
            let min = series_fold(outputs, o, f64::INFINITY, f64::min);
            let max = series_fold(outputs, o, f64::NEG_INFINITY, f64::max);
            checks.push(InvariantCheck::at_least(
                &format!("{}_nonnegative", o.name()),
                min,
                -INFO_TOL,
                "min over all samples",
            ));
            checks.push(InvariantCheck::at_most(
                &format!("{}_bounded", o.name()),
                max,
                c_max + INFO_TOL,
                "max over all samples vs log 2",
            ));
        }
    }
    if has(CoherenceB) {
        checks.push(InvariantCheck::at_most(
            "coherence_b_initial",
            initial_abs(outputs, CoherenceB),
            INFO_TOL,
            "empty battery is incoherent",
        ));
    }
    if has(ErgotropyB) {
        let min = series_fold(outputs, ErgotropyB, f64::INFINITY, f64::min);
        let excess = outputs
            .iter()
            .fold(f64::NEG_INFINITY, |a, o| a.max(o.ergotropy_excess));
        checks.push(InvariantCheck::at_least(
            "ergotropy_b_nonnegative",
            min,
            -INFO_TOL,
            "min over all samples",
        ));
        checks.push(InvariantCheck::at_most(
            "ergotropy_b_below_energy",
            excess,
            INFO_TOL,
            "max of ergotropy minus battery energy",
        ));
        checks.push(InvariantCheck::at_most(
            "ergotropy_b_initial",
            initial_abs(outputs, ErgotropyB),
            INFO_TOL,
            "empty battery is passive",
        ));
    }
    checks
}

/// Resolves, integrates and writes one scenario.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let started = Instant::now();
    let resolved = cfg.resolve()?;
    log::info!(
        "{}: {} jobs, {} steps each",
        cfg.name,
        resolved.jobs.len(),
        resolved.steps
    );
    let (outputs, threads) = run_jobs(&resolved, opts.threads)?;

    std::fs::create_dir_all(&opts.out_dir)?;
    let config_json = cfg.canonical_json();
    let config_sha256 = sha256_hex(config_json.as_bytes());
    let files = write_tables(&resolved, &outputs, &config_sha256, &opts.out_dir)?;

    let sweep = resolved.sweep_parameter();
    let mut hygiene = HygieneRecord::default();
    let jobs: Vec<JobRecord> = resolved
        .jobs
        .iter()
        .zip(&outputs)
        .map(|(job, out)| {
            let h = HygieneRecord::from_stats(
                &out.stats,
                out.stored_trace_error,
                out.stored_hermiticity,
            );
            hygiene.merge(&h);
            JobRecord {
                label: job.label(sweep),
                f: job.f,
                sweep_value: job.sweep_value,
                hygiene: h,
            }
        })
        .collect();
    let invariants = invariants(&resolved, &outputs, &hygiene, &files);

    let manifest = RunManifest {
        tool: format!("qbattery {}", env!("CARGO_PKG_VERSION")),
        scenario: cfg.name.clone(),
        config: serde_json::from_str(&config_json).expect("canonical JSON parses"),
        config_sha256,
        integrator: IntegratorInfo {
            method: "rk4".into(),
            dt: resolved.grid.dt,
            t_max: resolved.grid.t_max,
            steps: resolved.steps,
            stride: resolved.grid.stride,
            stored_points: resolved.stored_points(),
            step_hygiene: "hermitian part and trace renormalization after every step".into(),
            abort_trace_drift: ABORT_TRACE_DRIFT,
            abort_min_eigenvalue: ABORT_NEGATIVITY,
            max_dt_omega: MAX_DT_OMEGA,
        },
        hygiene,
        jobs,
        invariants,
        threads,
        wall_time_s: started.elapsed().as_secs_f64(),
        files,
    };
    let manifest_path = opts.out_dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, text + "\n")?;
    Ok(RunOutcome {
        manifest,
        manifest_path,
    })
}
