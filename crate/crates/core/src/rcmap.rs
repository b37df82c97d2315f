//! Reaction-coordinate embedding: the qubit plus one truncated harmonic mode
//! per bath, damped by the residual Ohmic baths.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::qcore::{
    annihilation, embed, pauli, thermal_rc_state, BathAxis, ComplexMatrix, DensityMatrix,
};
use crate::redfield::{build_generator, propagate, Coupling, PropagationOptions, Trajectory};
use crate::spectral::BathSpec;

/// Largest extended Hilbert dimension accepted.
pub const MAX_EXTENDED_DIM: usize = 1024;

/// Qubit parameters and the baths it couples to.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Level splitting Δ of `Δσ^z`.
    pub delta: f64,
    /// Tunneling E of `Eσ^x`.
    pub tunneling: f64,
    pub baths: Vec<BathSpec>,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(invalid(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !self.tunneling.is_finite() {
            return Err(invalid("tunneling must be finite"));
        }
        if self.baths.is_empty() || self.baths.len() > 3 {
            return Err(invalid(format!(
                "expected 1 to 3 baths, got {}",
                self.baths.len()
            )));
        }
        for (i, b) in self.baths.iter().enumerate() {
            b.validate()?;
            if self.baths[..i].iter().any(|o| o.axis == b.axis) {
                return Err(invalid(format!("bath axis {} declared twice", b.axis)));
            }
        }
        Ok(())
    }

    pub fn bath(&self, axis: BathAxis) -> Option<&BathSpec> {
        self.baths.iter().find(|b| b.axis == axis)
    }

    /// Baths with a nonzero coupling, ordered x, y, z.
    pub fn active_baths(&self) -> Vec<BathSpec> {
        let mut active: Vec<BathSpec> = self
            .baths
            .iter()
            .filter(|b| b.lambda > 0.0)
            .copied()
            .collect();
        active.sort_by_key(|b| b.axis.index());
        active
    }

    /// Step bound `0.01/Δ`, or `0.01` when Δ = 0.
    pub fn max_step(&self) -> f64 {
        if self.delta > 0.0 {
            0.01 / self.delta
        } else {
            0.01
        }
    }

    /// Qubit Hamiltonian `Δσ^z + Eσ^x`.
    pub fn qubit_hamiltonian(&self) -> ComplexMatrix {
        pauli(BathAxis::Z) * C64::new(self.delta, 0.0)
            + pauli(BathAxis::X) * C64::new(self.tunneling, 0.0)
    }
}

/// Qubit ⊗ reaction coordinates with the residual bath couplings.
#[derive(Debug, Clone)]
pub struct ExtendedSystem {
    pub hamiltonian: ComplexMatrix,
    pub couplings: Vec<Coupling>,
    /// Subsystem dimensions, qubit first.
    pub dims: Vec<usize>,
    /// Axis of each reaction-coordinate slot, in slot order.
    pub axes: Vec<BathAxis>,
    pub levels: usize,
}

impl ExtendedSystem {
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }
}

fn extended_dims(model: &ModelConfig, levels: usize) -> Result<Vec<usize>> {
    if levels == 0 {
        return Err(invalid("each reaction coordinate needs at least one level"));
    }
    let mut dims = vec![2usize];
    let mut d = 2usize;
    for _ in model.active_baths() {
        d = d.saturating_mul(levels);
        if d > MAX_EXTENDED_DIM {
            return Err(invalid(format!(
                "extended dimension exceeds {MAX_EXTENDED_DIM} with {levels} levels per mode"
            )));
        }
        dims.push(levels);
    }
    Ok(dims)
}

/// Builds `Δσ^z + Eσ^x + Σ_α [Ω_α a†a + λ_α σ^α (a† + a)]` and the residual
/// couplings `a† + a` of every active bath.
pub fn build_extended(model: &ModelConfig, levels: usize) -> Result<ExtendedSystem> {
    model.validate()?;
    let dims = extended_dims(model, levels)?;
    let d: usize = dims.iter().product();
    let mut h = embed(&model.qubit_hamiltonian(), 0, &dims)?;
    let a = annihilation(levels)?;
    let number = a.adjoint() * &a;
    let position = &a + a.adjoint();
    let mut couplings = Vec::new();
    let mut axes = Vec::new();
    for (slot, bath) in model.active_baths().iter().enumerate() {
        let x = embed(&position, slot + 1, &dims)?;
        let sigma = embed(&pauli(bath.axis), 0, &dims)?;
        h += embed(&number, slot + 1, &dims)? * C64::new(bath.omega, 0.0);
        h += crate::qcore::matmul(&sigma, &x) * C64::new(bath.lambda, 0.0);
        couplings.push(Coupling::new(x, bath.residual(), bath.temperature));
        axes.push(bath.axis);
    }
    debug_assert_eq!(h.nrows(), d);
    Ok(ExtendedSystem {
        hamiltonian: h,
        couplings,
        dims,
        axes,
        levels,
    })
}

/// `ρ_qubit ⊗ ρ_th(Ω_α, T_α)` over the active baths.
pub fn initial_extended_state(
    model: &ModelConfig,
    levels: usize,
    rho_qubit: &DensityMatrix,
) -> Result<DensityMatrix> {
    model.validate()?;
    if rho_qubit.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_qubit.dim(),
        });
    }
    extended_dims(model, levels)?;
    let mut state = rho_qubit.clone();
    for bath in model.active_baths() {
        state = state.tensor(&thermal_rc_state(bath.omega, bath.temperature, levels)?);
    }
    Ok(state)
}

/// End-to-end reaction-coordinate dynamics with the default step control.
pub fn simulate_rc_qme(
    model: &ModelConfig,
    levels: usize,
    rho_qubit: &DensityMatrix,
    times: &[f64],
) -> Result<Trajectory> {
    simulate_rc_qme_with(
        model,
        levels,
        rho_qubit,
        times,
        &PropagationOptions::with_max_step(model.max_step()),
    )
}

pub fn simulate_rc_qme_with(
    model: &ModelConfig,
    levels: usize,
    rho_qubit: &DensityMatrix,
    times: &[f64],
    options: &PropagationOptions,
) -> Result<Trajectory> {
    let ext = build_extended(model, levels)?;
    let rho0 = initial_extended_state(model, levels, rho_qubit)?;
    let gen = build_generator(&ext.hamiltonian, &ext.couplings)?;
    propagate(&gen, &rho0, times, options)
}
