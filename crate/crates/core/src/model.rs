//! Physical parameters and every operator of the machine–charger–battery
//! model.
//!
//! All qubits use `H = ω σ⁺σ⁻ = ω|1⟩⟨1|`, so ground states carry zero
//! energy. The two machine qubits each see a local thermal bath; their
//! joint transition `|1_{M1} 0_{M2}⟩ ↔ |0_{M1} 1_{M2}⟩` is resonant with the
//! charger and the battery (`ω_{M2} − ω_{M1} = ω_C = ω_B`).

use alloc::vec::Vec;
use core::ops::Deref;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::linalg::{embed, qubit, CMatrix, Subsystem, SubsystemLayout, C64};
use crate::state::DensityMatrix;

/// Relative tolerance of the resonance condition.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Couplings and rates above this fraction of `ω_{M2}` leave the
/// weak-coupling regime.
pub const WEAK_COUPLING_FRACTION: f64 = 0.1;

/// Raw parameter values. `Default` is the reference parameter set:
/// `ω_{M2} = 10`, `ω_{M1} = 2`, `ω_C = ω_B = 8`, `γ₁ = γ₂ = 0.2`,
/// `k = 0.3`, `g = 0.3`, `T₂ = 30`, `T₁ = 3`, `f = 0`, `τ = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub omega_m1: f64,
    pub omega_m2: f64,
    pub omega_c: f64,
    pub omega_b: f64,
    /// Machine–charger coupling.
    pub g: f64,
    /// Charger–battery coupling.
    pub k: f64,
    /// Drive amplitude on the charger.
    pub f: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Cold bath temperature (`k_B = 1`).
    pub t1: f64,
    /// Hot bath temperature.
    pub t2: f64,
    /// End of the interaction window; `f64::INFINITY` keeps it open.
    pub tau: f64,
}

impl Default for ParamSet {
    fn default() -> Self {
        ParamSet {
            omega_m1: 2.0,
            omega_m2: 10.0,
            omega_c: 8.0,
            omega_b: 8.0,
            g: 0.3,
            k: 0.3,
            f: 0.0,
            gamma1: 0.2,
            gamma2: 0.2,
            t1: 3.0,
            t2: 30.0,
            tau: f64::INFINITY,
        }
    }
}

/// Soft violations: the model is still integrated, but outside the regime
/// where the local master equation is justified or the machine ordering
/// assumptions hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamWarning {
    StrongCoupling {
        name: &'static str,
        value: f64,
        limit: f64,
    },
    MachineFrequencyOrder,
    BathTemperatureOrder,
}

/// A [`ParamSet`] that passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    values: ParamSet,
    warnings: Vec<ParamWarning>,
}

impl ModelParams {
    pub fn new(values: ParamSet) -> Result<Self, Error> {
        let positive = [
            ("omega_m1", values.omega_m1),
            ("omega_m2", values.omega_m2),
            ("omega_c", values.omega_c),
            ("omega_b", values.omega_b),
            ("t1", values.t1),
            ("t2", values.t2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and > 0",
                });
            }
        }
        let nonneg = [
            ("g", values.g),
            ("k", values.k),
            ("f", values.f),
            ("gamma1", values.gamma1),
            ("gamma2", values.gamma2),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and >= 0",
                });
            }
        }
        if values.tau.is_nan() || values.tau <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: "must be > 0 (or +inf)",
            });
        }
        let scale = values.omega_m2.max(values.omega_c);
        if (values.omega_m2 - values.omega_m1 - values.omega_c).abs() > RESONANCE_TOL * scale {
            return Err(Error::InvalidParameter {
                name: "omega_c",
                reason: "resonance requires omega_m2 - omega_m1 == omega_c",
            });
        }
        if (values.omega_c - values.omega_b).abs() > RESONANCE_TOL * scale {
            return Err(Error::InvalidParameter {
                name: "omega_b",
                reason: "resonance requires omega_c == omega_b",
            });
        }

        let mut warnings = Vec::new();
        let limit = WEAK_COUPLING_FRACTION * values.omega_m2;
        for (name, value) in [
            ("g", values.g),
            ("k", values.k),
            ("gamma1", values.gamma1),
            ("gamma2", values.gamma2),
        ] {
            if value > limit * (1.0 + 1e-12) {
                warnings.push(ParamWarning::StrongCoupling { name, value, limit });
            }
        }
        if values.omega_m1 >= values.omega_m2 {
            warnings.push(ParamWarning::MachineFrequencyOrder);
        }
        if values.t1 > values.t2 {
            warnings.push(ParamWarning::BathTemperatureOrder);
        }
        for w in &warnings {
            log::warn!("model parameters: {w:?}");
        }
        Ok(ModelParams { values, warnings })
    }

    pub fn values(&self) -> &ParamSet {
        &self.values
    }

    pub fn warnings(&self) -> &[ParamWarning] {
        &self.warnings
    }

    /// Resonant machine transition frequency `ω_{M2} − ω_{M1}`.
    pub fn omega_m12(&self) -> f64 {
        self.values.omega_m2 - self.values.omega_m1
    }

    /// Largest bare frequency; bounds the integrator step.
    pub fn max_frequency(&self) -> f64 {
        let v = &self.values;
        v.omega_m1.max(v.omega_m2).max(v.omega_c).max(v.omega_b)
    }

    /// Copy with some fields changed, re-validated.
    pub fn with(&self, edit: impl FnOnce(&mut ParamSet)) -> Result<Self, Error> {
        let mut v = self.values;
        edit(&mut v);
        ModelParams::new(v)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::new(ParamSet::default()).expect("reference parameters are valid")
    }
}

impl Deref for ModelParams {
    type Target = ParamSet;
    fn deref(&self) -> &ParamSet {
        &self.values
    }
}

/// Mean bath occupation `1/(e^{ω/T} − 1)`.
pub fn bose_occupation(temp: f64, omega: f64) -> f64 {
    1.0 / (omega / temp).exp_m1()
}

/// Ground and excited populations of `e^{−βω|1⟩⟨1|}/Z`.
pub fn thermal_populations(beta: f64, omega: f64) -> (f64, f64) {
    let x = beta * omega;
    let p_e = 1.0 / (1.0 + x.exp());
    (1.0 - p_e, p_e)
}

/// Gibbs state of a qubit with gap `omega` at inverse temperature `beta`.
pub fn thermal_qubit_state(beta: f64, omega: f64, slot: Subsystem) -> Result<DensityMatrix, Error> {
    if !(beta > 0.0) || !(omega > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta/omega",
            reason: "must be > 0",
        });
    }
    let (p_g, p_e) = thermal_populations(beta, omega);
    DensityMatrix::qubit(CMatrix::diag_real(&[p_g, p_e]), slot)
}

/// `ρ_{M1} ⊗ ρ_{M2}` with each machine qubit at its bath temperature.
pub fn machine_gibbs_state(p: &ModelParams) -> DensityMatrix {
    let m1 = thermal_qubit_state(1.0 / p.t1, p.omega_m1, Subsystem::M1).expect("validated params");
    let m2 = thermal_qubit_state(1.0 / p.t2, p.omega_m2, Subsystem::M2).expect("validated params");
    m1.tensor(&m2).expect("distinct labels")
}

/// `ρ_{M12}^{Gibbs} ⊗ ρ_C ⊗ ρ_B` in the standard layout.
pub fn product_initial_state(
    p: &ModelParams,
    charger: &CMatrix,
    battery: &CMatrix,
) -> Result<DensityMatrix, Error> {
    let c = DensityMatrix::qubit(charger.clone(), Subsystem::C)?;
    let b = DensityMatrix::qubit(battery.clone(), Subsystem::B)?;
    machine_gibbs_state(p).tensor(&c)?.tensor(&b)
}

/// Local free Hamiltonians embedded in the 16-dimensional space.
#[derive(Debug, Clone)]
pub struct FreeHamiltonians {
    pub h_m1: CMatrix,
    pub h_m2: CMatrix,
    pub h_m12: CMatrix,
    pub h_c: CMatrix,
    pub h_b: CMatrix,
}

fn local(op: &CMatrix, slot: Subsystem) -> CMatrix {
    embed(op, slot, &SubsystemLayout::standard()).expect("standard layout holds every slot")
}

pub fn build_free_hamiltonians(p: &ModelParams) -> FreeHamiltonians {
    let n = qubit::excited_projector();
    let h_m1 = local(&n, Subsystem::M1).scale_real(p.omega_m1);
    let h_m2 = local(&n, Subsystem::M2).scale_real(p.omega_m2);
    FreeHamiltonians {
        h_m12: &h_m1 + &h_m2,
        h_m1,
        h_m2,
        h_c: local(&n, Subsystem::C).scale_real(p.omega_c),
        h_b: local(&n, Subsystem::B).scale_real(p.omega_b),
    }
}

/// `(H_{C−B}, H_{M12−C})`.
///
/// `H_{M12−C} = g(σ⁻_{M1} σ⁺_{M2} σ⁻_C + h.c.)`, which is
/// `g(|0_{M1}1_{M2}0_C⟩⟨1_{M1}0_{M2}1_C| + h.c.) ⊗ I_B`.
pub fn build_interactions(p: &ModelParams) -> (CMatrix, CMatrix) {
    let (sp, sm) = (qubit::sigma_plus(), qubit::sigma_minus());
    let exchange = local(&sp, Subsystem::C).matmul(&local(&sm, Subsystem::B));
    let h_cb = (&exchange + &exchange.adjoint()).scale_real(p.k);
    let pump = local(&sm, Subsystem::M1)
        .matmul(&local(&sp, Subsystem::M2))
        .matmul(&local(&sm, Subsystem::C));
    let h_m12c = (&pump + &pump.adjoint()).scale_real(p.g);
    (h_cb, h_m12c)
}

/// `ΔH_F(t) = f(e^{−iω_C t} σ⁺_C + e^{iω_C t} σ⁻_C)`.
pub fn build_drive(p: &ModelParams, t: f64) -> CMatrix {
    drive_from_raising(
        &local(&qubit::sigma_plus(), Subsystem::C),
        p.f,
        p.omega_c,
        t,
    )
}

fn drive_from_raising(sigma_plus_c: &CMatrix, f: f64, omega: f64, t: f64) -> CMatrix {
    let phase = C64::from_polar(f, -omega * t);
    let up = sigma_plus_c.scale(phase);
    let down = up.adjoint();
    up + down
}

/// A Lindblad channel `rate · D[op]`.
#[derive(Debug, Clone)]
pub struct JumpOperator {
    pub label: &'static str,
    pub op: CMatrix,
    pub rate: f64,
}

/// Thermal emission and absorption on each machine qubit:
/// `γ_m(n̄_m + 1) D[σ⁻_{Mm}]` and `γ_m n̄_m D[σ⁺_{Mm}]`.
pub fn build_jump_operators(p: &ModelParams) -> Vec<JumpOperator> {
    let n1 = bose_occupation(p.t1, p.omega_m1);
    let n2 = bose_occupation(p.t2, p.omega_m2);
    let (sp, sm) = (qubit::sigma_plus(), qubit::sigma_minus());
    alloc::vec![
        JumpOperator {
            label: "sigma_minus_m1",
            op: local(&sm, Subsystem::M1),
            rate: p.gamma1 * (n1 + 1.0),
        },
        JumpOperator {
            label: "sigma_plus_m1",
            op: local(&sp, Subsystem::M1),
            rate: p.gamma1 * n1,
        },
        JumpOperator {
            label: "sigma_minus_m2",
            op: local(&sm, Subsystem::M2),
            rate: p.gamma2 * (n2 + 1.0),
        },
        JumpOperator {
            label: "sigma_plus_m2",
            op: local(&sp, Subsystem::M2),
            rate: p.gamma2 * n2,
        },
    ]
}

/// Every static operator of the model, built once per parameter set.
#[derive(Debug, Clone)]
pub struct SystemOperators {
    pub free: FreeHamiltonians,
    /// `H₀ = H_{M12} + H_C + H_B`.
    pub h0: CMatrix,
    pub h_cb: CMatrix,
    pub h_m12c: CMatrix,
    pub jumps: Vec<JumpOperator>,
    sigma_plus_c: CMatrix,
    drive_amplitude: f64,
    drive_frequency: f64,
}

impl SystemOperators {
    pub fn new(p: &ModelParams) -> Self {
        let free = build_free_hamiltonians(p);
        let h0 = &(&free.h_m12 + &free.h_c) + &free.h_b;
        let (h_cb, h_m12c) = build_interactions(p);
        SystemOperators {
            free,
            h0,
            h_cb,
            h_m12c,
            jumps: build_jump_operators(p),
            sigma_plus_c: local(&qubit::sigma_plus(), Subsystem::C),
            drive_amplitude: p.f,
            drive_frequency: p.omega_c,
        }
    }

    pub fn drive(&self, t: f64) -> CMatrix {
        drive_from_raising(
            &self.sigma_plus_c,
            self.drive_amplitude,
            self.drive_frequency,
            t,
        )
    }

    /// Every static Hamiltonian and `drive(t)`.
    pub fn hamiltonians(&self, t: f64) -> [(&'static str, CMatrix); 7] {
        [
            ("h_m12", self.free.h_m12.clone()),
            ("h_c", self.free.h_c.clone()),
            ("h_b", self.free.h_b.clone()),
            ("h0", self.h0.clone()),
            ("h_cb", self.h_cb.clone()),
            ("h_m12c", self.h_m12c.clone()),
            ("drive", self.drive(t)),
        ]
    }
}

/// Operating regime read off the virtual temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineRegime {
    /// `T_v < 0`: the machine transition is population-inverted.
    HeatPump,
    /// `0 < T_v < T₁`: colder than the cold bath.
    Refrigerator,
    /// `T₁ ≤ T_v ≤ T₂`.
    Intermediate,
    /// `T_v > T₂`: hotter than the hot bath.
    Engine,
}

impl MachineRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            MachineRegime::HeatPump => "heat pump",
            MachineRegime::Refrigerator => "refrigerator",
            MachineRegime::Intermediate => "intermediate",
            MachineRegime::Engine => "engine",
        }
    }
}

/// `T_v = ω_{M12} / (ω_{M2}β₂ − ω_{M1}β₁)`.
pub fn virtual_temperature(p: &ModelParams) -> Result<f64, Error> {
    let denom = p.omega_m2 / p.t2 - p.omega_m1 / p.t1;
    if denom == 0.0 {
        return Err(Error::EquilibriumDegeneracy);
    }
    Ok(p.omega_m12() / denom)
}

pub fn classify_regime(p: &ModelParams, t_v: f64) -> MachineRegime {
    if t_v < 0.0 {
        MachineRegime::HeatPump
    } else if t_v < p.t1.min(p.t2) {
        MachineRegime::Refrigerator
    } else if t_v <= p.t1.max(p.t2) {
        MachineRegime::Intermediate
    } else {
        MachineRegime::Engine
    }
}

/// Max-entry norms of the conservation commutators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorReport {
    /// `‖[H₀, H_{M12−C}]‖_max`
    pub h0_machine_coupling: f64,
    /// `‖[H₀, H_{C−B}]‖_max`
    pub h0_charger_battery: f64,
    /// `‖[H₀, ΔH_F(t)] − fω_C(e^{−iω_C t}σ⁺_C − e^{iω_C t}σ⁻_C)‖_max`
    pub drive_residual: f64,
    /// Same residual against `fω_C(e^{iω_C t}σ⁻_C + e^{−iω_C t}σ⁺_C)`,
    /// which differs in the sign of the lowering term. Zero only for `f = 0`.
    pub drive_residual_symmetric_form: f64,
}

pub fn verify_conservation_commutators(p: &ModelParams, t: f64) -> CommutatorReport {
    let ops = SystemOperators::new(p);
    let drive = ops.drive(t);
    let comm = ops.h0.commutator(&drive);
    let up = ops
        .sigma_plus_c
        .scale(C64::from_polar(p.f * p.omega_c, -p.omega_c * t));
    let down = up.adjoint();
    let closed = &up - &down;
    let symmetric = &up + &down;
    CommutatorReport {
        h0_machine_coupling: ops.h0.commutator(&ops.h_m12c).max_abs(),
        h0_charger_battery: ops.h0.commutator(&ops.h_cb).max_abs(),
        drive_residual: comm.max_abs_diff(&closed),
        drive_residual_symmetric_form: comm.max_abs_diff(&symmetric),
    }
}
