//! Gaussian-averaged dressing factors κ_α of the Pauli operators.
//!
//! After the polaron transform each σ^α is multiplied by an average over the
//! reaction-coordinate momenta. In polar (two baths) or spherical (three
//! baths) coordinates the radial part is a damped cosine integral and the
//! angular part is smooth, so both are done by nested adaptive quadrature.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{invalid, Result};
use crate::quadrature::{integrate, Tolerance};

/// The radial integrands are negligible beyond this radius.
const RADIAL_CUTOFF: f64 = 6.5;
const INNER_TOL: Tolerance = Tolerance {
    abs: 1e-13,
    rel: 1e-12,
    max_intervals: 20000,
};
const OUTER_TOL: Tolerance = Tolerance {
    abs: 1e-11,
    rel: 1e-11,
    max_intervals: 4000,
};

/// Dressing factors for the three qubit axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressingSet {
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub kappa_z: f64,
    /// `(ε_x, ε_y, ε_z)`, zero for absent baths.
    pub epsilons: [f64; 3],
    /// Estimated absolute quadrature error of each κ.
    pub errors: [f64; 3],
}

impl DressingSet {
    pub fn kappas(&self) -> [f64; 3] {
        [self.kappa_x, self.kappa_y, self.kappa_z]
    }

    fn new(kappas: [f64; 3], epsilons: [f64; 3], errors: [f64; 3]) -> Self {
        Self {
            kappa_x: kappas[0],
            kappa_y: kappas[1],
            kappa_z: kappas[2],
            epsilons,
            errors,
        }
    }
}

/// The two-argument dressing functions `(h, f, g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDressing {
    pub h: f64,
    pub f: f64,
    pub g: f64,
    /// Estimated absolute errors of `(h, f, g)`.
    pub errors: [f64; 3],
}

fn check_eps(values: &[f64]) -> Result<()> {
    if values.iter().all(|e| *e >= 0.0 && e.is_finite()) {
        Ok(())
    } else {
        Err(invalid(format!(
            "couplings must be finite and >= 0, got {values:?}"
        )))
    }
}

/// `∫₀^∞ r e^{−r²} cos(2√2 r D) dr` with its error estimate.
fn radial_plane(d: f64) -> Result<(f64, f64)> {
    let k = 2.0 * SQRT_2 * d;
    let est = integrate(
        |r| r * (-r * r).exp() * (k * r).cos(),
        0.0,
        RADIAL_CUTOFF,
        INNER_TOL,
    )?;
    let tail = 0.5 * (-RADIAL_CUTOFF * RADIAL_CUTOFF).exp();
    Ok((est.value, est.error + tail))
}

/// `∫₀^∞ r² e^{−r²} cos(2√2 r D) dr` with its error estimate.
fn radial_space(d: f64) -> Result<(f64, f64)> {
    let k = 2.0 * SQRT_2 * d;
    let est = integrate(
        |r| r * r * (-r * r).exp() * (k * r).cos(),
        0.0,
        RADIAL_CUTOFF,
        INNER_TOL,
    )?;
    let tail = RADIAL_CUTOFF * (-RADIAL_CUTOFF * RADIAL_CUTOFF).exp();
    Ok((est.value, est.error + tail))
}

#[derive(Clone, Copy)]
enum PairKind {
    H,
    F,
    G,
}

fn pair_function(a: f64, b: f64, kind: PairKind) -> Result<(f64, f64)> {
    let mut inner_err: f64 = 0.0;
    let mut failure = None;
    // Symmetry in θ → −θ and θ → π − θ reduces [0, 2π] to a quarter.
    let est = integrate(
        |theta| {
            let (s, c) = theta.sin_cos();
            let wa = c * c * a * a;
            let wb = s * s * b * b;
            let d2 = wa + wb;
            let (radial, err) = match radial_plane(d2.sqrt()) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    (0.0, 0.0)
                }
            };
            inner_err = inner_err.max(err);
            if d2 == 0.0 {
                return match kind {
                    PairKind::F => radial,
                    _ => 0.5,
                };
            }
            let (pa, pb) = (wa / d2, wb / d2);
            match kind {
                PairKind::H => pb * radial + 0.5 * pa,
                PairKind::F => radial,
                PairKind::G => pa * radial + 0.5 * pb,
            }
        },
        0.0,
        FRAC_PI_2,
        OUTER_TOL,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let scale = 4.0 / PI;
    Ok((
        scale * est.value,
        scale * (est.error + FRAC_PI_2 * inner_err),
    ))
}

/// Dressing functions of the model with baths on axes `a` and `b`: `h`
/// dresses the `a` operator, `g` the `b` operator and `f` the third one.
pub fn kappa_pair(eps_a: f64, eps_b: f64) -> Result<PairDressing> {
    check_eps(&[eps_a, eps_b])?;
    if eps_a == 0.0 && eps_b == 0.0 {
        return Ok(PairDressing {
            h: 1.0,
            f: 1.0,
            g: 1.0,
            errors: [0.0; 3],
        });
    }
    let (h, eh) = pair_function(eps_a, eps_b, PairKind::H)?;
    let (f, ef) = pair_function(eps_a, eps_b, PairKind::F)?;
    let (g, eg) = pair_function(eps_a, eps_b, PairKind::G)?;
    Ok(PairDressing {
        h: if eps_b == 0.0 { 1.0 } else { h },
        f,
        g: if eps_a == 0.0 { 1.0 } else { g },
        errors: [eh, ef, eg],
    })
}

/// Spherical average for the operator whose own coupling is `own`; the
/// other two couplings are `p` and `q`.
fn triple_function(own: f64, p: f64, q: f64) -> Result<(f64, f64)> {
    let mut inner_err: f64 = 0.0;
    let mut failure = None;
    let half_gauss = 0.25 * PI.sqrt();
    let outer = integrate(
        |theta| {
            let (st, ct) = theta.sin_cos();
            let axial = ct * ct * own * own;
            let est = integrate(
                |phi| {
                    let (sp, cp) = phi.sin_cos();
                    let transverse = st * st * (cp * cp * p * p + sp * sp * q * q);
                    let d2 = transverse + axial;
                    let (radial, err) = match radial_space(d2.sqrt()) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.get_or_insert(e);
                            (0.0, 0.0)
                        }
                    };
                    inner_err = inner_err.max(err);
                    if d2 == 0.0 {
                        return half_gauss;
                    }
                    (transverse * radial + axial * half_gauss) / d2
                },
                0.0,
                FRAC_PI_2,
                OUTER_TOL,
            );
            match est {
                Ok(v) => {
                    inner_err = inner_err.max(v.error);
                    st * v.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        FRAC_PI_2,
        OUTER_TOL,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    // Octant symmetry: θ ∈ [0, π/2] counts twice and φ ∈ [0, π/2] four times.
    let scale = 8.0 / PI.powf(1.5);
    let err = outer.error + FRAC_PI_2 * (inner_err + FRAC_PI_2 * inner_err);
    Ok((scale * outer.value, scale * err))
}

/// Full three-dimensional quadrature, without the reductions used by
/// [`kappa_triple`] when some couplings vanish.
pub fn kappa_triple_quadrature(eps_x: f64, eps_y: f64, eps_z: f64) -> Result<DressingSet> {
    check_eps(&[eps_x, eps_y, eps_z])?;
    let (kx, ex) = triple_function(eps_x, eps_y, eps_z)?;
    let (ky, ey) = triple_function(eps_y, eps_z, eps_x)?;
    let (kz, ez) = triple_function(eps_z, eps_x, eps_y)?;
    Ok(DressingSet::new(
        [kx, ky, kz],
        [eps_x, eps_y, eps_z],
        [ex, ey, ez],
    ))
}

/// Dressing factors for arbitrary couplings on the three axes.
///
/// When a coupling vanishes the two-argument functions are used with the
/// cyclic assignment of the remaining pair.
pub fn kappa_triple(eps_x: f64, eps_y: f64, eps_z: f64) -> Result<DressingSet> {
    check_eps(&[eps_x, eps_y, eps_z])?;
    let eps = [eps_x, eps_y, eps_z];
    let zeros = eps.iter().filter(|e| **e == 0.0).count();
    if zeros == 3 {
        return Ok(DressingSet::new([1.0; 3], eps, [0.0; 3]));
    }
    if zeros == 0 {
        return kappa_triple_quadrature(eps_x, eps_y, eps_z);
    }
    let set = if eps_y == 0.0 {
        let p = kappa_pair(eps_x, eps_z)?;
        DressingSet::new(
            [p.h, p.f, p.g],
            eps,
            [p.errors[0], p.errors[1], p.errors[2]],
        )
    } else if eps_z == 0.0 {
        let p = kappa_pair(eps_x, eps_y)?;
        DressingSet::new(
            [p.h, p.g, p.f],
            eps,
            [p.errors[0], p.errors[2], p.errors[1]],
        )
    } else {
        let p = kappa_pair(eps_y, eps_z)?;
        DressingSet::new(
            [p.f, p.h, p.g],
            eps,
            [p.errors[1], p.errors[0], p.errors[2]],
        )
    };
    Ok(set)
}
