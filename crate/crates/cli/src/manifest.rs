use qbattery_core::dynamics::HygieneStats;
use serde::{Deserialize, Serialize};

/// Record of one run: inputs, integrator settings, state hygiene, checks
/// and the emitted files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub scenario: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub integrator: IntegratorInfo,
    pub hygiene: HygieneRecord,
    pub jobs: Vec<JobRecord>,
    pub invariants: Vec<InvariantCheck>,
    pub threads: usize,
    pub wall_time_s: f64,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    pub fn all_passed(&self) -> bool {
        self.invariants.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.invariants.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorInfo {
    pub method: String,
    pub dt: f64,
    pub t_max: f64,
    pub steps: usize,
    pub stride: usize,
    pub stored_points: usize,
    pub step_hygiene: String,
    pub abort_trace_drift: f64,
    pub abort_min_eigenvalue: f64,
    pub max_dt_omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct HygieneRecord {
    pub steps: usize,
    pub renormalizations: usize,
    pub max_trace_drift: f64,
    pub max_hermiticity_residual: f64,
    pub positivity_checks: usize,
    pub min_eigenvalue: f64,
    pub stored_max_trace_error: f64,
    pub stored_max_hermiticity_residual: f64,
}

impl HygieneRecord {
    pub fn from_stats(s: &HygieneStats, stored_trace: f64, stored_herm: f64) -> Self {
        HygieneRecord {
            steps: s.steps,
            renormalizations: s.renormalizations,
            max_trace_drift: s.max_trace_drift,
            max_hermiticity_residual: s.max_hermiticity_residual,
            positivity_checks: s.positivity_checks,
            min_eigenvalue: s.min_eigenvalue,
            stored_max_trace_error: stored_trace,
            stored_max_hermiticity_residual: stored_herm,
        }
    }

    pub fn merge(&mut self, o: &HygieneRecord) {
        if self.positivity_checks == 0 {
            self.min_eigenvalue = o.min_eigenvalue;
        } else if o.positivity_checks > 0 {
            self.min_eigenvalue = self.min_eigenvalue.min(o.min_eigenvalue);
        }
        self.steps += o.steps;
        self.renormalizations += o.renormalizations;
        self.max_trace_drift = self.max_trace_drift.max(o.max_trace_drift);
        self.max_hermiticity_residual = self
            .max_hermiticity_residual
            .max(o.max_hermiticity_residual);
        self.positivity_checks += o.positivity_checks;
        self.stored_max_trace_error = self.stored_max_trace_error.max(o.stored_max_trace_error);
        self.stored_max_hermiticity_residual = self
            .stored_max_hermiticity_residual
            .max(o.stored_max_hermiticity_residual);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub label: String,
    pub f: f64,
    pub sweep_value: Option<f64>,
    pub hygiene: HygieneRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl InvariantCheck {
    /// `value ≤ threshold`
    pub fn at_most(name: &str, value: f64, threshold: f64, detail: &str) -> Self {
        InvariantCheck {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }

    /// `value ≥ threshold`
    pub fn at_least(name: &str, value: f64, threshold: f64, detail: &str) -> Self {
        InvariantCheck {
            name: name.into(),
            passed: value >= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
    pub bytes: usize,
}
