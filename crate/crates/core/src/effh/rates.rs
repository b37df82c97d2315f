//! Decoherence and relaxation rates of the dressed two-level model.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::effh::dressing::{kappa_triple, DressingSet};
use crate::error::Result;
use crate::qcore::{pauli, BathAxis, ComplexMatrix};
use crate::rcmap::ModelConfig;
use crate::redfield::Coupling;
use crate::spectral::{effective_j, BathSpec};

/// Rates of the dressed qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffhRates {
    pub gamma_x_eff: f64,
    pub gamma_y_eff: f64,
    pub gamma_z_eff: f64,
    /// Dressed level splitting `2κ_zΔ`.
    pub omega21: f64,
    /// Coherence oscillation frequency; imaginary when overdamped.
    pub theta: C64,
    /// `(Γ^x + Γ^y + 2Γ^z)/2`.
    pub gamma_d: f64,
    /// Population relaxation rate `Γ^x + Γ^y`.
    pub relaxation: f64,
    pub dressing: DressingSet,
}

impl EffhRates {
    /// Assembles the derived quantities from the three axis rates.
    pub fn from_axis_rates(
        gamma_x: f64,
        gamma_y: f64,
        gamma_z: f64,
        omega21: f64,
        dressing: DressingSet,
    ) -> Self {
        let half_split = 0.5 * (gamma_x - gamma_y);
        let theta = C64::new(omega21 * omega21 - half_split * half_split, 0.0).sqrt();
        Self {
            gamma_x_eff: gamma_x,
            gamma_y_eff: gamma_y,
            gamma_z_eff: gamma_z,
            omega21,
            theta,
            gamma_d: (gamma_x + gamma_y + 2.0 * gamma_z) / 2.0,
            relaxation: gamma_x + gamma_y,
            dressing,
        }
    }
}

fn epsilons(model: &ModelConfig) -> [f64; 3] {
    let mut eps = [0.0; 3];
    for b in &model.baths {
        eps[b.axis.index()] = b.epsilon();
    }
    eps
}

/// `2πκ² J_eff(ω)(2n(ω) + 1)`, with its ω → 0 limit `16πκ²ε²γT`.
fn transverse_rate(bath: &BathSpec, kappa: f64, omega21: f64) -> f64 {
    let eps = bath.epsilon();
    let t = bath.temperature;
    if omega21.abs() < 1e-12 {
        return 16.0 * PI * kappa * kappa * eps * eps * bath.gamma * t;
    }
    let w = omega21.abs();
    let thermal = if t == 0.0 {
        1.0
    } else {
        1.0 / (w / (2.0 * t)).tanh()
    };
    2.0 * PI * kappa * kappa * effective_j(w, eps, bath.gamma, bath.cutoff) * thermal
}

/// Effective rates of `model` from its dressing factors.
pub fn effh_rates(model: &ModelConfig) -> Result<EffhRates> {
    model.validate()?;
    let [ex, ey, ez] = epsilons(model);
    let dressing = kappa_triple(ex, ey, ez)?;
    let omega21 = 2.0 * dressing.kappa_z * model.delta;
    let gx = model
        .bath(BathAxis::X)
        .map_or(0.0, |b| transverse_rate(b, dressing.kappa_x, omega21));
    let gy = model
        .bath(BathAxis::Y)
        .map_or(0.0, |b| transverse_rate(b, dressing.kappa_y, omega21));
    let gz = model.bath(BathAxis::Z).map_or(0.0, |b| {
        let k = dressing.kappa_z;
        16.0 * PI * k * k * b.epsilon() * b.epsilon() * b.gamma * b.temperature
    });
    Ok(EffhRates::from_axis_rates(gx, gy, gz, omega21, dressing))
}

/// Dressed two-level model ready for the Redfield solver.
#[derive(Debug, Clone)]
pub struct EffectiveModel {
    /// `κ_zΔσ^z + κ_xEσ^x`.
    pub hamiltonian: ComplexMatrix,
    /// `κ_ασ^α` against the effective Ohmic density of each coupled bath.
    pub couplings: Vec<Coupling>,
    pub dressing: DressingSet,
}

pub fn build_effective_model(model: &ModelConfig) -> Result<EffectiveModel> {
    model.validate()?;
    let [ex, ey, ez] = epsilons(model);
    let dressing = kappa_triple(ex, ey, ez)?;
    let kappas = dressing.kappas();
    let hamiltonian = pauli(BathAxis::Z) * C64::new(dressing.kappa_z * model.delta, 0.0)
        + pauli(BathAxis::X) * C64::new(dressing.kappa_x * model.tunneling, 0.0);
    let couplings = model
        .active_baths()
        .iter()
        .map(|b| {
            Coupling::new(
                pauli(b.axis) * C64::new(kappas[b.axis.index()], 0.0),
                b.effective(),
                b.temperature,
            )
        })
        .collect();
    Ok(EffectiveModel {
        hamiltonian,
        couplings,
        dressing,
    })
}
