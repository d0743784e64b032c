//! Scenario documents: schema, parsing and validation.
//!
//! A scenario is one TOML or JSON document. Every key is optional; missing
//! keys take the reference parameter set and the defaults below. Unknown
//! keys are rejected with the path of the offending field.
//!
//! ```toml
//! name = "fig4"
//! initial_state = "plus_charger_empty_battery"
//! dt = 0.001
//! t_max = 100.0
//! stride = 10                     # or: time_columns = 400
//! observables = ["delta_e_c", "delta_e_b", "delta_e_m12"]
//! f_values = [0.0, 0.8]           # one output variant per drive amplitude
//! log_base = "2"
//!
//! [params]                        # any ParamSet field; tau may be omitted
//! g = 0.3
//!
//! [sweep]
//! parameter = "g"                 # g | k | f
//! values = [0.1, 0.3, 0.6, 0.9]
//!
//! [sigma_pair]                    # needed by the sigma_* observables
//! charger = "excited"             # branches: battery |0⟩ vs |1⟩
//! ```

use std::fmt;
use std::path::Path;

use qbattery_core::dynamics::GridSpec;
use qbattery_core::linalg::{qubit, CMatrix, Subsystem};
use qbattery_core::model::{ModelParams, ParamSet};
use qbattery_core::observables::LogBase;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    SigmaB,
    SigmaC,
    SigmaM12,
    MutualInformationCb,
    MutualInformationM12cb,
    DeltaEC,
    DeltaEB,
    DeltaEM12,
    PowerB,
    CoherenceC,
    CoherenceB,
    ErgotropyB,
}

impl Observable {
    pub const ALL: [Observable; 12] = [
        Observable::SigmaB,
        Observable::SigmaC,
        Observable::SigmaM12,
        Observable::MutualInformationCb,
        Observable::MutualInformationM12cb,
        Observable::DeltaEC,
        Observable::DeltaEB,
        Observable::DeltaEM12,
        Observable::PowerB,
        Observable::CoherenceC,
        Observable::CoherenceB,
        Observable::ErgotropyB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::SigmaB => "sigma_b",
            Observable::SigmaC => "sigma_c",
            Observable::SigmaM12 => "sigma_m12",
            Observable::MutualInformationCb => "mutual_information_cb",
            Observable::MutualInformationM12cb => "mutual_information_m12cb",
            Observable::DeltaEC => "delta_e_c",
            Observable::DeltaEB => "delta_e_b",
            Observable::DeltaEM12 => "delta_e_m12",
            Observable::PowerB => "power_b",
            Observable::CoherenceC => "coherence_c",
            Observable::CoherenceB => "coherence_b",
            Observable::ErgotropyB => "ergotropy_b",
        }
    }

    pub fn unit(self, base: LogBase) -> &'static str {
        let info = match base {
            LogBase::Two => "bits",
            LogBase::E => "nats",
        };
        match self {
            Observable::SigmaB | Observable::SigmaC | Observable::SigmaM12 => "1/time",
            Observable::MutualInformationCb
            | Observable::MutualInformationM12cb
            | Observable::CoherenceC
            | Observable::CoherenceB => info,
            Observable::DeltaEC => "omega_C",
            Observable::DeltaEB | Observable::ErgotropyB => "omega_B",
            Observable::DeltaEM12 => "1",
            Observable::PowerB => "omega_B/time",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Observable::SigmaB => "trace-distance derivative of the battery",
            Observable::SigmaC => "trace-distance derivative of the charger",
            Observable::SigmaM12 => "trace-distance derivative of the machine pair",
            Observable::MutualInformationCb => "charger-battery mutual information",
            Observable::MutualInformationM12cb => "total correlation of M12 | C | B",
            Observable::DeltaEC => "charger energy change over omega_C",
            Observable::DeltaEB => "battery energy change over omega_B",
            Observable::DeltaEM12 => "sum of machine energy changes over their frequencies",
            Observable::PowerB => "charging power Delta E_B / (omega_B t)",
            Observable::CoherenceC => "relative entropy of coherence of the charger",
            Observable::CoherenceB => "relative entropy of coherence of the battery",
            Observable::ErgotropyB => "battery ergotropy over omega_B",
        }
    }

    /// Subsystem whose trace distance the observable differentiates.
    pub fn sigma_subsystem(self) -> Option<&'static [Subsystem]> {
        match self {
            Observable::SigmaB => Some(&[Subsystem::B]),
            Observable::SigmaC => Some(&[Subsystem::C]),
            Observable::SigmaM12 => Some(&[Subsystem::M1, Subsystem::M2]),
            _ => None,
        }
    }

    pub fn is_sigma(self) -> bool {
        self.sigma_subsystem().is_some()
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargerState {
    /// `|1⟩⟨1|`
    Excited,
    /// `|+⟩⟨+|`
    Plus,
}

impl ChargerState {
    pub fn matrix(self) -> CMatrix {
        match self {
            ChargerState::Excited => qubit::excited_projector(),
            ChargerState::Plus => qubit::plus_state(),
        }
    }
}

/// Charger and battery at `t = 0`; the machine always starts in its Gibbs
/// state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    ExcitedChargerEmptyBattery,
    #[default]
    PlusChargerEmptyBattery,
}

impl InitialState {
    pub fn charger(self) -> ChargerState {
        match self {
            InitialState::ExcitedChargerEmptyBattery => ChargerState::Excited,
            InitialState::PlusChargerEmptyBattery => ChargerState::Plus,
        }
    }
}

/// Two trajectories that share the machine and charger and start with the
/// battery in `|0⟩` and `|1⟩` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaPairSpec {
    #[serde(default = "default_pair_charger")]
    pub charger: ChargerState,
}

fn default_pair_charger() -> ChargerState {
    ChargerState::Excited
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    G,
    K,
    F,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::G => "g",
            SweepParameter::K => "k",
            SweepParameter::F => "f",
        }
    }

    pub fn apply(self, p: &mut ParamSet, value: f64) {
        match self {
            SweepParameter::G => p.g = value,
            SweepParameter::K => p.k = value,
            SweepParameter::F => p.f = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LogBaseName {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl From<LogBaseName> for LogBase {
    fn from(b: LogBaseName) -> LogBase {
        match b {
            LogBaseName::Two => LogBase::Two,
            LogBaseName::E => LogBase::E,
        }
    }
}

/// Overrides of the reference parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    /// Omitted means the interaction window never closes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, base: ParamSet) -> ParamSet {
        let mut p = base;
        let fields: [(&Option<f64>, &mut f64); 12] = [
            (&self.omega_m1, &mut p.omega_m1),
            (&self.omega_m2, &mut p.omega_m2),
            (&self.omega_c, &mut p.omega_c),
            (&self.omega_b, &mut p.omega_b),
            (&self.g, &mut p.g),
            (&self.k, &mut p.k),
            (&self.f, &mut p.f),
            (&self.gamma1, &mut p.gamma1),
            (&self.gamma2, &mut p.gamma2),
            (&self.t1, &mut p.t1),
            (&self.t2, &mut p.t2),
            (&self.tau, &mut p.tau),
        ];
        for (o, slot) in fields {
            if let Some(v) = o {
                *slot = *v;
            }
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub params: ParamOverrides,
    pub initial_state: InitialState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_pair: Option<SigmaPairSpec>,
    pub dt: f64,
    pub t_max: f64,
    /// Keep every `stride`-th step. Exclusive with `time_columns`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    /// Keep `time_columns + 1` evenly spaced points including `t = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_columns: Option<usize>,
    pub observables: Vec<Observable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Drive amplitudes run as separate output variants; defaults to
    /// `params.f`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_values: Option<Vec<f64>>,
    pub log_base: LogBaseName,
}

pub const DEFAULT_STRIDE: usize = 10;

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "custom".into(),
            description: String::new(),
            params: ParamOverrides::default(),
            initial_state: InitialState::default(),
            sigma_pair: None,
            dt: 1e-3,
            t_max: 100.0,
            stride: None,
            time_columns: None,
            observables: vec![
                Observable::DeltaEC,
                Observable::DeltaEB,
                Observable::DeltaEM12,
            ],
            sweep: None,
            f_values: None,
            log_base: LogBaseName::Two,
        }
    }
}

/// One integration job: a drive variant and (optionally) a sweep point.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub variant: usize,
    pub f: f64,
    pub sweep_value: Option<f64>,
    pub params: ModelParams,
}

impl JobSpec {
    pub fn label(&self, sweep: Option<SweepParameter>) -> String {
        match (self.sweep_value, sweep) {
            (Some(v), Some(s)) => format!("f={:?}, {}={:?}", self.f, s.name(), v),
            _ => format!("f={:?}", self.f),
        }
    }
}

/// A validated scenario with its job list.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub config: ScenarioConfig,
    pub grid: GridSpec,
    pub steps: usize,
    pub f_values: Vec<f64>,
    pub jobs: Vec<JobSpec>,
}

impl ResolvedScenario {
    pub fn log_base(&self) -> LogBase {
        self.config.log_base.into()
    }

    pub fn sweep_parameter(&self) -> Option<SweepParameter> {
        self.config.sweep.as_ref().map(|s| s.parameter)
    }

    pub fn stored_points(&self) -> usize {
        self.steps / self.grid.stride + 1
    }

    /// Jobs of one variant, in sweep order.
    pub fn variant_jobs(&self, variant: usize) -> impl Iterator<Item = (usize, &JobSpec)> {
        self.jobs
            .iter()
            .enumerate()
            .filter(move |(_, j)| j.variant == variant)
    }
}

fn err(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

fn check_values(path: &str, values: &[f64], allow_zero: bool) -> Result<(), ConfigError> {
    if values.is_empty() {
        return Err(err(path, "must not be empty"));
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() || *v < 0.0 || (!allow_zero && *v == 0.0) {
            return Err(err(
                format!("{path}[{i}]"),
                format!("{v} is not an admissible value"),
            ));
        }
        if values[..i].contains(v) {
            return Err(err(format!("{path}[{i}]"), format!("duplicate value {v}")));
        }
    }
    Ok(())
}

impl ScenarioConfig {
    /// Checks every invariant and expands the job list.
    pub fn resolve(&self) -> Result<ResolvedScenario, ConfigError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(err("dt", "must be finite and > 0"));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(err("t_max", "must be finite and > 0"));
        }
        let steps_f = (self.t_max / self.dt).round();
        if steps_f < 1.0 || (steps_f * self.dt - self.t_max).abs() > 1e-9 * self.t_max {
            return Err(err("t_max", "must be an integer multiple of dt"));
        }
        let steps = steps_f as usize;
        let stride = match (self.stride, self.time_columns) {
            (Some(_), Some(_)) => {
                return Err(err("time_columns", "cannot be combined with stride"));
            }
            (Some(0), None) => return Err(err("stride", "must be >= 1")),
            (Some(s), None) => s,
            (None, Some(0)) => return Err(err("time_columns", "must be >= 1")),
            (None, Some(c)) => {
                if steps % c != 0 {
                    return Err(err(
                        "time_columns",
                        format!("must divide the {steps} steps"),
                    ));
                }
                steps / c
            }
            (None, None) => DEFAULT_STRIDE,
        };
        if steps % stride != 0 {
            return Err(err("stride", format!("must divide the {steps} steps")));
        }
        let grid = GridSpec::new(self.dt, self.t_max, stride);

        if self.observables.is_empty() {
            return Err(err("observables", "must list at least one observable"));
        }
        for (i, o) in self.observables.iter().enumerate() {
            if self.observables[..i].contains(o) {
                return Err(err(
                    format!("observables[{i}]"),
                    format!("duplicate observable {o}"),
                ));
            }
            if o.is_sigma() && self.sigma_pair.is_none() {
                return Err(err("sigma_pair", format!("required by observable {o}")));
            }
        }

        if let Some(s) = &self.sweep {
            check_values("sweep.values", &s.values, true)?;
            if s.parameter == SweepParameter::F && self.f_values.is_some() {
                return Err(err("f_values", "cannot be combined with a sweep over f"));
            }
        }
        let base = self.params.apply(ParamSet::default());
        let f_values = match &self.f_values {
            Some(v) => {
                check_values("f_values", v, true)?;
                v.clone()
            }
            None => vec![base.f],
        };

        let param_path = |e: &qbattery_core::Error, fallback: &str| match e {
            qbattery_core::Error::InvalidParameter { name, reason } => {
                err(format!("{fallback}{name}"), *reason)
            }
            other => err(fallback.trim_end_matches('.'), other.to_string()),
        };
        let mut jobs = Vec::new();
        for (variant, &f) in f_values.iter().enumerate() {
            let mut p = base;
            p.f = f;
            let points: Vec<Option<f64>> = match &self.sweep {
                Some(s) => s.values.iter().map(|v| Some(*v)).collect(),
                None => vec![None],
            };
            for (i, point) in points.into_iter().enumerate() {
                let mut q = p;
                let mut path = String::from("params.");
                if let (Some(v), Some(s)) = (point, &self.sweep) {
                    s.parameter.apply(&mut q, v);
                    path = format!("sweep.values[{i}]: params.");
                }
                let params = ModelParams::new(q).map_err(|e| param_path(&e, &path))?;
                if self.dt * params.max_frequency() > qbattery_core::dynamics::MAX_DT_OMEGA {
                    return Err(err(
                        "dt",
                        "dt * omega_max exceeds the RK4 stability guard 0.05",
                    ));
                }
                jobs.push(JobSpec {
                    variant,
                    f,
                    sweep_value: point,
                    params,
                });
            }
        }
        Ok(ResolvedScenario {
            config: self.clone(),
            grid,
            steps,
            f_values,
            jobs,
        })
    }

    /// Canonical JSON text; its digest identifies the run's inputs.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Toml,
}

/// Parses a document. JSON when it starts with `{`, TOML otherwise; an
/// empty document is the default config.
pub fn parse_config(text: &str, format: Option<Format>) -> Result<ScenarioConfig, ConfigError> {
    let format = format.unwrap_or_else(|| {
        if text.trim_start().starts_with('{') {
            Format::Json
        } else {
            Format::Toml
        }
    });
    let cfg: ScenarioConfig = match format {
        Format::Json => {
            let de = &mut serde_json::Deserializer::from_str(text);
            serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?
        }
        Format::Toml => {
            let de = toml::Deserializer::new(text);
            serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
                path: e.path().to_string(),
                message: e.inner().message().to_string(),
            })?
        }
    };
    cfg.resolve()?;
    Ok(cfg)
}

/// Loads a document from a file (format from the extension) or, when
/// `source` is not an existing path, parses it as inline text.
pub fn load_config(source: &str) -> Result<ScenarioConfig, ConfigError> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: source.to_string(),
            message: e.to_string(),
        })?;
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Some(Format::Json),
            Some("toml") => Some(Format::Toml),
            _ => None,
        };
        return parse_config(&text, format);
    }
    parse_config(source, None)
}
