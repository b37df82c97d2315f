//! Exact coherence decay of the pure-dephasing model (a single σ^z bath).
//!
//! `Γ(t) = −4 ∫₀^∞ J(ω) coth(ω/2T) (1 − cos ωt) / ω² dω` and
//! `ρ12(t) = ρ12(0) e^{Γ(t)} e^{2iΔt}`.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::qcore::{qubit_elements, BathAxis, ComplexMatrix, DensityMatrix};
use crate::quadrature::{integrate_partitioned, Tolerance};
use crate::redfield::{Observables, Trajectory};
use crate::spectral::{BathSpec, SpectralDensity};

const PIECE_TOL: Tolerance = Tolerance {
    abs: 1e-11,
    rel: 1e-11,
    max_intervals: 20000,
};
const TAIL_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 40;

/// Pure-dephasing model: a qubit `Δσ^z` with one Brownian z bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingKernel {
    pub density: SpectralDensity,
    pub temperature: f64,
    pub delta: f64,
}

impl DephasingKernel {
    pub fn new(bath: &BathSpec, delta: f64) -> Result<Self> {
        bath.validate()?;
        if bath.axis != BathAxis::Z {
            return Err(invalid("the exact dephasing solution needs a z bath"));
        }
        Self::with_density(bath.brownian(), bath.temperature, delta)
    }

    /// Kernel for an arbitrary spectral density.
    pub fn with_density(density: SpectralDensity, temperature: f64, delta: f64) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(invalid(format!(
                "temperature must be > 0, got {temperature}"
            )));
        }
        if !delta.is_finite() {
            return Err(invalid("delta must be finite"));
        }
        Ok(Self {
            density,
            temperature,
            delta,
        })
    }

    /// Scale where the spectral weight sits, used to place the integration pieces.
    fn scale(&self) -> f64 {
        match self.density {
            SpectralDensity::Brownian { omega, .. } => omega,
            SpectralDensity::Ohmic { cutoff, .. }
            | SpectralDensity::EffectiveOhmic { cutoff, .. } => cutoff,
        }
    }

    /// Bound on the integral beyond `w` for a fixed time.
    fn tail_bound(&self, w: f64) -> f64 {
        let thermal = 1.0 / (w / (2.0 * self.temperature)).tanh();
        match self.density {
            // J ≤ 4γΩ²λ²/ω³ for ω ≥ √2 Ω and 1 − cos ≤ 2.
            SpectralDensity::Brownian {
                lambda,
                omega,
                gamma,
            } => {
                4.0 * 2.0 * 4.0 * gamma * omega * omega * lambda * lambda * thermal
                    / (4.0 * w.powi(4))
            }
            _ => {
                let slope = self.density.low_frequency_slope();
                let cutoff = self.scale();
                // ∫_w^∞ γω e^{−ω/Λ} · 2/ω² ≤ 2γ e^{−w/Λ} Λ / w.
                4.0 * 2.0 * slope * thermal * cutoff * (-w / cutoff).exp() / w
            }
        }
    }

    fn integrand(&self, w: f64, t: f64) -> f64 {
        let temp = self.temperature;
        let slope_part = if w == 0.0 {
            self.density.low_frequency_slope()
        } else {
            self.density.eval(w) / w
        };
        // ω·coth(ω/2T), with its series near zero.
        let thermal = if w < 1e-6 * temp {
            2.0 * temp + w * w / (6.0 * temp)
        } else {
            w / (w / (2.0 * temp)).tanh()
        };
        // (1 − cos ωt)/ω² = 2 sin²(ωt/2)/ω².
        let osc = if w == 0.0 {
            0.5 * t * t
        } else {
            let s = (0.5 * w * t).sin() / w;
            2.0 * s * s
        };
        slope_part * thermal * osc
    }

    /// `Γ(t)` with its estimated absolute error.
    pub fn gamma_with_error(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(invalid(format!("time must be finite and >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok((0.0, 0.0));
        }
        let f = |w: f64| self.integrand(w, t);
        let mut upper = 2.0 * self.scale();
        // Resolve the oscillation of the first window with enough pieces.
        let pieces = ((upper * t / 2.0).ceil() as usize).clamp(16, 4096);
        let first = integrate_partitioned(f, 0.0, upper, pieces, PIECE_TOL)?;
        let (mut value, mut error) = (first.value, first.error);
        for _ in 0..MAX_DOUBLINGS {
            let next = 2.0 * upper;
            let pieces = ((upper * t / 2.0).ceil() as usize).clamp(4, 4096);
            let piece = integrate_partitioned(f, upper, next, pieces, PIECE_TOL)?;
            value += piece.value;
            error += piece.error;
            upper = next;
            if piece.value.abs() < TAIL_TOL && self.tail_bound(upper) < TAIL_TOL {
                let total_err = 4.0 * (error + self.tail_bound(upper));
                return Ok((-4.0 * value, total_err));
            }
        }
        Err(Error::Quadrature(format!(
            "dephasing integral tail not converged by ω = {upper:e}"
        )))
    }

    pub fn gamma(&self, t: f64) -> Result<f64> {
        Ok(self.gamma_with_error(t)?.0)
    }

    /// `⟨σ^x(t)⟩` for the initial coherence ρ12 = 1/2.
    pub fn sigma_x(&self, t: f64) -> Result<f64> {
        Ok(self.gamma(t)?.exp() * (2.0 * self.delta * t).cos())
    }

    /// Exact reduced dynamics from any initial qubit state.
    pub fn trajectory(&self, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
        if rho0.dim() != 2 {
            return Err(invalid("initial state must be a qubit"));
        }
        let (rho11, rho12_0) = qubit_elements(rho0.matrix());
        let mut traj = Trajectory {
            times: times.to_vec(),
            states: Vec::with_capacity(times.len()),
            observables: Vec::with_capacity(times.len()),
            step: 0.0,
        };
        for &t in times {
            let rho12 = rho12_0 * self.gamma(t)?.exp() * C64::new(0.0, 2.0 * self.delta * t).exp();
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(1, 1)] = C64::new(rho11, 0.0);
            m[(0, 0)] = C64::new(1.0 - rho11, 0.0);
            m[(1, 0)] = rho12;
            m[(0, 1)] = rho12.conj();
            traj.observables.push(Observables {
                sx: 2.0 * rho12.re,
                sz: 1.0 - 2.0 * rho11,
                re_rho12: rho12.re,
                im_rho12: rho12.im,
                trace_err: 0.0,
            });
            traj.states.push(DensityMatrix::new_unchecked(m, vec![2]));
        }
        Ok(traj)
    }
}

/// `Γ(t)` of the pure-dephasing model.
pub fn dephasing_gamma(kernel: &DephasingKernel, t: f64) -> Result<f64> {
    kernel.gamma(t)
}

/// `e^{Γ(t)} cos(2Δt)`.
pub fn dephasing_sigma_x(kernel: &DephasingKernel, t: f64) -> Result<f64> {
    kernel.sigma_x(t)
}
