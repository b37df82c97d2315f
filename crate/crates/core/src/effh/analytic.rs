//! Closed-form dynamics of the dressed two-level model without tunneling.
//!
//! With `u = ρ12 + ρ21` and `v = ρ12 − ρ21` the coherences obey a linear
//! 2×2 system whose propagator is written with `cos θt` and `sin θt / θ`.
//! Both are entire functions of θ², so the overdamped case (θ² < 0) uses
//! their hyperbolic forms. Populations relax independently.

use num_complex::Complex64 as C64;

use crate::effh::rates::EffhRates;
use crate::error::{invalid, Result};
use crate::qcore::{qubit_elements, ComplexMatrix, DensityMatrix};
use crate::redfield::{Observables, Trajectory};

/// Solution of the dressed qubit dynamics for one initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSolution {
    pub rates: EffhRates,
    pub beta: f64,
    rho11_0: f64,
    u0: C64,
    v0: C64,
}

impl AnalyticSolution {
    /// `beta` may be infinite (zero temperature).
    pub fn new(rates: EffhRates, beta: f64, rho0: &DensityMatrix) -> Result<Self> {
        if rho0.dim() != 2 {
            return Err(invalid("initial state must be a qubit"));
        }
        if !(beta >= 0.0) {
            return Err(invalid(format!(
                "inverse temperature must be >= 0, got {beta}"
            )));
        }
        let (rho11, rho12) = qubit_elements(rho0.matrix());
        let rho21 = rho0.matrix()[(0, 1)];
        Ok(Self {
            rates,
            beta,
            rho11_0: rho11,
            u0: rho12 + rho21,
            v0: rho12 - rho21,
        })
    }

    /// Equilibrium population of the lower level.
    pub fn equilibrium_rho11(&self) -> f64 {
        let x = self.beta * self.rates.omega21;
        if x.is_nan() {
            return 0.5;
        }
        1.0 / (1.0 + (-x).exp())
    }

    /// `(cos θt, sin θt / θ)` on the real axis of θ².
    fn propagator_parts(&self, t: f64) -> (f64, f64) {
        let half_split = 0.5 * (self.rates.gamma_x_eff - self.rates.gamma_y_eff);
        let w = self.rates.omega21;
        let theta2 = w * w - half_split * half_split;
        if theta2 > 0.0 {
            let th = theta2.sqrt();
            ((th * t).cos(), (th * t).sin() / th)
        } else if theta2 < 0.0 {
            let k = (-theta2).sqrt();
            ((k * t).cosh(), (k * t).sinh() / k)
        } else {
            (1.0, t)
        }
    }

    /// `(u, v) = (ρ12 + ρ21, ρ12 − ρ21)` at time `t`.
    fn coherences(&self, t: f64) -> (C64, C64) {
        let r = &self.rates;
        let delta = 0.5 * (r.gamma_x_eff - r.gamma_y_eff);
        let damp = (-r.gamma_d * t).exp();
        let (cos_part, sin_part) = self.propagator_parts(t);
        let i_w = C64::new(0.0, r.omega21 * sin_part);
        let u = (self.u0 * (cos_part + delta * sin_part) + i_w * self.v0) * damp;
        let v = (i_w * self.u0 + self.v0 * (cos_part - delta * sin_part)) * damp;
        (u, v)
    }

    fn population(&self, t: f64) -> f64 {
        let p_eq = self.equilibrium_rho11();
        p_eq + (self.rho11_0 - p_eq) * (-self.rates.relaxation * t).exp()
    }

    /// `(ρ11, ρ12)` at time `t`.
    pub fn elements(&self, t: f64) -> (f64, C64) {
        let (u, v) = self.coherences(t);
        (self.population(t), 0.5 * (u + v))
    }

    /// Full 2×2 density matrix at time `t`.
    pub fn matrix(&self, t: f64) -> ComplexMatrix {
        let (u, v) = self.coherences(t);
        let rho11 = self.population(t);
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(1, 1)] = C64::new(rho11, 0.0);
        m[(0, 0)] = C64::new(1.0 - rho11, 0.0);
        m[(1, 0)] = 0.5 * (u + v);
        m[(0, 1)] = 0.5 * (u - v);
        m
    }
}

/// Closed-form trajectory sampled at `times`.
pub fn analytic_dynamics(
    rates: &EffhRates,
    beta: f64,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Trajectory> {
    let sol = AnalyticSolution::new(*rates, beta, rho0)?;
    let mut traj = Trajectory {
        times: times.to_vec(),
        states: Vec::with_capacity(times.len()),
        observables: Vec::with_capacity(times.len()),
        step: 0.0,
    };
    for &t in times {
        let m = sol.matrix(t);
        let rho12 = m[(1, 0)];
        traj.observables.push(Observables {
            sx: 2.0 * rho12.re,
            sz: m[(0, 0)].re - m[(1, 1)].re,
            re_rho12: rho12.re,
            im_rho12: rho12.im,
            trace_err: (m[(0, 0)] + m[(1, 1)] - C64::new(1.0, 0.0)).norm(),
        });
        traj.states.push(DensityMatrix::new_unchecked(m, vec![2]));
    }
    Ok(traj)
}
