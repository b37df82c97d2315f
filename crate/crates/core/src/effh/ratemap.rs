//! Decoherence-rate maps over a grid of (ε_x, ε_z).

use rayon::prelude::*;

use crate::effh::rates::effh_rates;
use crate::error::{invalid, Result};
use crate::qcore::BathAxis;
use crate::rcmap::ModelConfig;

/// Rates and dressing factors at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCell {
    pub eps_x: f64,
    pub eps_z: f64,
    pub gamma_d: f64,
    pub gamma_x_eff: f64,
    pub gamma_z_eff: f64,
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub kappa_z: f64,
}

/// Cells stored with ε_z as the outer and ε_x as the inner index.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMap {
    pub eps_x: Vec<f64>,
    pub eps_z: Vec<f64>,
    pub cells: Vec<RateCell>,
}

impl RateMap {
    pub fn cell(&self, iz: usize, ix: usize) -> &RateCell {
        &self.cells[iz * self.eps_x.len() + ix]
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid(format!("{name} grid is empty")));
    }
    if grid.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
        return Err(invalid(format!(
            "{name} grid must contain finite values >= 0"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(format!("{name} grid must be strictly ascending")));
    }
    Ok(())
}

/// The template with the x and z couplings set to `λ = ε·Ω`.
pub fn model_at(template: &ModelConfig, eps_x: f64, eps_z: f64) -> ModelConfig {
    let mut m = template.clone();
    for b in &mut m.baths {
        match b.axis {
            BathAxis::X => b.lambda = eps_x * b.omega,
            BathAxis::Z => b.lambda = eps_z * b.omega,
            BathAxis::Y => {}
        }
    }
    m
}

/// Evaluates every grid cell independently, in parallel on the current
/// rayon pool; the result order does not depend on scheduling.
pub fn rate_map(template: &ModelConfig, eps_x: &[f64], eps_z: &[f64]) -> Result<RateMap> {
    template.validate()?;
    if template.bath(BathAxis::X).is_none() || template.bath(BathAxis::Z).is_none() {
        return Err(invalid("rate maps need both an x and a z bath"));
    }
    check_grid("eps_x", eps_x)?;
    check_grid("eps_z", eps_z)?;
    let nx = eps_x.len();
    let cells = (0..nx * eps_z.len())
        .into_par_iter()
        .map(|idx| {
            let (ex, ez) = (eps_x[idx % nx], eps_z[idx / nx]);
            let r = effh_rates(&model_at(template, ex, ez))?;
            Ok(RateCell {
                eps_x: ex,
                eps_z: ez,
                gamma_d: r.gamma_d,
                gamma_x_eff: r.gamma_x_eff,
                gamma_z_eff: r.gamma_z_eff,
                kappa_x: r.dressing.kappa_x,
                kappa_y: r.dressing.kappa_y,
                kappa_z: r.dressing.kappa_z,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateMap {
        eps_x: eps_x.to_vec(),
        eps_z: eps_z.to_vec(),
        cells,
    })
}
