//! Spectral densities, thermal occupation and Redfield rates.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::qcore::BathAxis;
use crate::quadrature::{integrate_partitioned, Tolerance};

/// One bosonic bath coupled to the qubit along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub axis: BathAxis,
    /// System–reaction-coordinate coupling λ.
    pub lambda: f64,
    /// Brownian peak / reaction-coordinate frequency Ω.
    pub omega: f64,
    /// Dimensionless width of the peak, equal to the residual Ohmic coupling.
    pub gamma: f64,
    pub temperature: f64,
    /// Exponential cutoff Λ of the residual Ohmic bath.
    pub cutoff: f64,
}

impl BathSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.lambda,
            self.omega,
            self.gamma,
            self.temperature,
            self.cutoff,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(invalid(format!(
                "bath {}: parameters must be finite",
                self.axis
            )));
        }
        if self.lambda < 0.0 {
            return Err(invalid(format!("bath {}: lambda must be >= 0", self.axis)));
        }
        if self.omega <= 0.0 || self.gamma <= 0.0 || self.cutoff <= 0.0 {
            return Err(invalid(format!(
                "bath {}: omega, gamma and cutoff must be > 0",
                self.axis
            )));
        }
        if self.temperature < 0.0 {
            return Err(invalid(format!(
                "bath {}: temperature must be >= 0",
                self.axis
            )));
        }
        Ok(())
    }

    /// Dimensionless coupling ε = λ/Ω.
    pub fn epsilon(&self) -> f64 {
        self.lambda / self.omega
    }

    /// The original structured bath.
    pub fn brownian(&self) -> SpectralDensity {
        SpectralDensity::Brownian {
            lambda: self.lambda,
            omega: self.omega,
            gamma: self.gamma,
        }
    }

    /// The residual Ohmic bath left after extracting the reaction coordinate.
    pub fn residual(&self) -> SpectralDensity {
        SpectralDensity::Ohmic {
            gamma: self.gamma,
            cutoff: self.cutoff,
        }
    }

    /// The residual bath as seen by the polaron-dressed qubit.
    pub fn effective(&self) -> SpectralDensity {
        SpectralDensity::EffectiveOhmic {
            epsilon: self.epsilon(),
            gamma: self.gamma,
            cutoff: self.cutoff,
        }
    }
}

/// The spectral density families used by the models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity {
    Brownian {
        lambda: f64,
        omega: f64,
        gamma: f64,
    },
    Ohmic {
        gamma: f64,
        cutoff: f64,
    },
    EffectiveOhmic {
        epsilon: f64,
        gamma: f64,
        cutoff: f64,
    },
}

impl SpectralDensity {
    /// J(ω) for ω ≥ 0.
    pub fn eval(&self, w: f64) -> f64 {
        match *self {
            Self::Brownian {
                lambda,
                omega,
                gamma,
            } => brownian_j(w, lambda, omega, gamma),
            Self::Ohmic { gamma, cutoff } => ohmic_j(w, gamma, cutoff),
            Self::EffectiveOhmic {
                epsilon,
                gamma,
                cutoff,
            } => effective_j(w, epsilon, gamma, cutoff),
        }
    }

    /// lim_{ω→0} J(ω)/ω, with any exponential cutoff sent to infinity.
    pub fn low_frequency_slope(&self) -> f64 {
        match *self {
            Self::Brownian {
                lambda,
                omega,
                gamma,
            } => 4.0 * gamma * lambda * lambda / (omega * omega),
            Self::Ohmic { gamma, .. } => gamma,
            Self::EffectiveOhmic { epsilon, gamma, .. } => 4.0 * epsilon * epsilon * gamma,
        }
    }
}

pub fn brownian_j(w: f64, lambda: f64, omega: f64, gamma: f64) -> f64 {
    let w2 = omega * omega;
    let detune = w * w - w2;
    let width = 2.0 * PI * gamma * omega * w;
    4.0 * gamma * w2 * lambda * lambda * w / (detune * detune + width * width)
}

pub fn ohmic_j(w: f64, gamma: f64, cutoff: f64) -> f64 {
    gamma * w * (-w / cutoff).exp()
}

pub fn effective_j(w: f64, epsilon: f64, gamma: f64, cutoff: f64) -> f64 {
    4.0 * epsilon * epsilon * ohmic_j(w, gamma, cutoff)
}

/// Bose–Einstein occupation 1/(e^{ω/T} − 1).
pub fn bose_einstein(w: f64, temperature: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(invalid(format!("occupation needs omega > 0, got {w}")));
    }
    if !(temperature > 0.0) {
        return Err(invalid(format!(
            "occupation needs temperature > 0, got {temperature}"
        )));
    }
    Ok(1.0 / (w / temperature).exp_m1())
}

/// Symmetric rate Γ(ω): emission for ω > 0, absorption for ω < 0.
pub fn rate_gamma(j: &SpectralDensity, w: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(invalid(format!(
            "rate needs temperature > 0, got {temperature}"
        )));
    }
    if w == 0.0 {
        return Ok(PI * j.low_frequency_slope() * temperature);
    }
    let n = bose_einstein(w.abs(), temperature)?;
    let jw = j.eval(w.abs());
    Ok(if w > 0.0 {
        PI * jw * (n + 1.0)
    } else {
        PI * jw * n
    })
}

/// Rate Γ(ω) extended to T = 0, where only emission survives.
pub(crate) fn rate_gamma_or_zero_temperature(
    j: &SpectralDensity,
    w: f64,
    temperature: f64,
) -> Result<f64> {
    if temperature == 0.0 {
        return Ok(if w > 0.0 { PI * j.eval(w) } else { 0.0 });
    }
    rate_gamma(j, w, temperature)
}

/// Reaction-coordinate coupling and frequency (λ, Ω) of a spectral density.
///
/// Brownian densities map exactly onto their own parameters. The other kinds
/// go through the moment integrals over `[0, upper]`.
pub fn rc_parameters(j: &SpectralDensity, upper: f64) -> Result<(f64, f64)> {
    match *j {
        SpectralDensity::Brownian { lambda, omega, .. } => Ok((lambda, omega)),
        _ => rc_parameters_from_fn(|w| j.eval(w), upper),
    }
}

/// Moment route for an arbitrary density: Ω² = ∫ω³J / ∫ωJ and λ² = ∫ωJ / Ω.
pub fn rc_parameters_from_fn<F: Fn(f64) -> f64>(j: F, upper: f64) -> Result<(f64, f64)> {
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(invalid(format!(
            "upper integration limit must be positive, got {upper}"
        )));
    }
    let tol = Tolerance::default();
    let moment = |power: i32, limit: f64| -> Result<f64> {
        Ok(integrate_partitioned(|w| w.powi(power) * j(w), 0.0, limit, 64, tol)?.value)
    };
    let m1 = moment(1, upper)?;
    let m3 = moment(3, upper)?;
    let m1_wide = moment(1, 2.0 * upper)?;
    let m3_wide = moment(3, 2.0 * upper)?;
    for (name, narrow, wide) in [("first", m1, m1_wide), ("third", m3, m3_wide)] {
        if !(wide.abs() > 0.0) || ((wide - narrow) / wide).abs() > 1e-3 {
            return Err(Error::Quadrature(format!(
                "{name} moment not converged on [0, {upper}]: {narrow:.6e} vs {wide:.6e} on the doubled window"
            )));
        }
    }
    if !(m1 > 0.0 && m3 > 0.0) {
        return Err(invalid("spectral density has non-positive moments"));
    }
    let omega = (m3_wide / m1_wide).sqrt();
    let lambda = (m1_wide / omega).sqrt();
    Ok((lambda, omega))
}
