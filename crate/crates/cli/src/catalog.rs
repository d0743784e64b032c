//! Built-in scenarios, one per figure of the charging study.
//!
//! Time series use the four machine couplings `g ∈ {0.1, 0.3, 0.6, 0.9}`
//! (`0.01…0.09 ω_{M2}`); density grids use 40 evenly spaced couplings in
//! `(0, 0.1 ω_{M2}]` and 400 time columns. Drive variants are `f = 0` and
//! `f = 0.1 ω_C = 0.8`.

use crate::config::{
    ChargerState, InitialState, Observable, ParamOverrides, ScenarioConfig, SigmaPairSpec,
    SweepParameter, SweepSpec,
};
use crate::error::ConfigError;

pub const SERIES_COUPLINGS: [f64; 4] = [0.1, 0.3, 0.6, 0.9];
pub const DRIVE_VARIANTS: [f64; 2] = [0.0, 0.8];
pub const DENSITY_POINTS: usize = 40;
pub const DENSITY_TIME_COLUMNS: usize = 400;

/// `n` evenly spaced values in `(0, max]`.
pub fn density_axis(max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| max * i as f64 / n as f64).collect()
}

fn series(
    name: &str,
    description: &str,
    initial_state: InitialState,
    observables: Vec<Observable>,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description: description.into(),
        initial_state,
        observables,
        sweep: Some(SweepSpec {
            parameter: SweepParameter::G,
            values: SERIES_COUPLINGS.to_vec(),
        }),
        f_values: Some(DRIVE_VARIANTS.to_vec()),
        ..ScenarioConfig::default()
    }
}

fn density(
    name: &str,
    description: &str,
    parameter: SweepParameter,
    observables: Vec<Observable>,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description: description.into(),
        initial_state: InitialState::PlusChargerEmptyBattery,
        observables,
        time_columns: Some(DENSITY_TIME_COLUMNS),
        sweep: Some(SweepSpec {
            parameter,
            values: density_axis(1.0, DENSITY_POINTS),
        }),
        f_values: Some(DRIVE_VARIANTS.to_vec()),
        ..ScenarioConfig::default()
    }
}

pub fn catalog() -> Vec<ScenarioConfig> {
    use Observable::*;
    vec![
        ScenarioConfig {
            sigma_pair: Some(SigmaPairSpec {
                charger: ChargerState::Excited,
            }),
            ..series(
                "fig2",
                "trace-distance derivative of battery, charger and machine",
                InitialState::ExcitedChargerEmptyBattery,
                vec![SigmaB, SigmaC, SigmaM12],
            )
        },
        series(
            "fig3",
            "charger-battery and tripartite mutual information",
            InitialState::ExcitedChargerEmptyBattery,
            vec![MutualInformationCb, MutualInformationM12cb],
        ),
        series(
            "fig4",
            "normalized internal energies of charger, battery and machine",
            InitialState::PlusChargerEmptyBattery,
            vec![DeltaEC, DeltaEB, DeltaEM12],
        ),
        density(
            "fig5",
            "charging power over time and machine coupling g",
            SweepParameter::G,
            vec![PowerB],
        ),
        series(
            "fig6",
            "relative entropy of coherence of charger and battery",
            InitialState::PlusChargerEmptyBattery,
            vec![CoherenceC, CoherenceB],
        ),
        density(
            "fig7",
            "battery ergotropy over time and machine coupling g",
            SweepParameter::G,
            vec![ErgotropyB],
        ),
        ScenarioConfig {
            params: ParamOverrides {
                g: Some(0.3),
                ..ParamOverrides::default()
            },
            sigma_pair: Some(SigmaPairSpec {
                charger: ChargerState::Plus,
            }),
            f_values: Some(vec![0.0]),
            ..density(
                "fig8",
                "battery sigma, coherence, power and ergotropy over time and charger coupling k",
                SweepParameter::K,
                vec![SigmaB, CoherenceB, PowerB, ErgotropyB],
            )
        },
    ]
}

pub fn lookup(name: &str) -> Result<ScenarioConfig, ConfigError> {
    catalog()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| ConfigError::UnknownScenario(name.to_string()))
}
