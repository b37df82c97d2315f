//! Nonsecular Redfield generator and its time integration.
//!
//! With the Lamb shift dropped, every bath contributes through the matrix
//! `X[j,l] = S[j,l]·Γ(ω_l − ω_j)` written in the Hamiltonian eigenbasis:
//!
//! `dρ/dt = −i[H,ρ] − Σ_α (S X ρ + ρ X† S − X ρ S − S ρ X†)`.
//!
//! Each application costs a handful of dense products, so the d²×d²
//! superoperator is never formed.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::qcore::{
    gemm_into, hermitian_deviation, is_hermitian, matmul, partial_trace_to_qubit, ComplexMatrix,
    DensityMatrix,
};
use crate::spectral::{rate_gamma_or_zero_temperature, SpectralDensity};

/// Bohr frequencies closer than this are treated as exactly degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Trace error tolerated during propagation.
pub const TRACE_FAILURE: f64 = 1e-6;
/// Most negative qubit eigenvalue tolerated during propagation.
pub const POSITIVITY_FAILURE: f64 = -1e-4;
/// Largest Hilbert dimension accepted by [`steady_state`].
pub const MAX_STEADY_STATE_DIM: usize = 16;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A system operator coupled linearly to one thermal bath.
#[derive(Debug, Clone)]
pub struct Coupling {
    pub operator: ComplexMatrix,
    pub density: SpectralDensity,
    pub temperature: f64,
}

impl Coupling {
    pub fn new(operator: ComplexMatrix, density: SpectralDensity, temperature: f64) -> Self {
        Self {
            operator,
            density,
            temperature,
        }
    }
}

#[derive(Debug, Clone)]
struct BathTerm {
    s: ComplexMatrix,
    x: ComplexMatrix,
    k: ComplexMatrix,
    rates: DMatrix<f64>,
}

/// Redfield generator of a Hamiltonian and a set of bath couplings.
#[derive(Debug, Clone)]
pub struct RedfieldGenerator {
    energies: Vec<f64>,
    basis: ComplexMatrix,
    baths: Vec<BathTerm>,
    norm_estimate: f64,
}

struct Workspace {
    b: ComplexMatrix,
    t: ComplexMatrix,
}

impl Workspace {
    fn new(d: usize) -> Self {
        Self {
            b: ComplexMatrix::zeros(d, d),
            t: ComplexMatrix::zeros(d, d),
        }
    }
}

fn hermitian_tolerance(m: &ComplexMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    1e-10 * scale
}

/// Eigen-decomposition with ascending eigenvalues and each eigenvector's
/// largest-magnitude component made real and positive.
fn canonical_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let d = h.nrows();
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let mut basis = ComplexMatrix::zeros(d, d);
    let mut energies = Vec::with_capacity(d);
    for (col, &src) in order.iter().enumerate() {
        energies.push(eig.eigenvalues[src]);
        let v = eig.eigenvectors.column(src);
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in v.iter().enumerate() {
            // Strict comparison with a small margin keeps the pivot choice
            // stable against last-bit noise between near-equal components.
            if z.norm() > best * (1.0 + 1e-12) {
                best = z.norm();
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            v[pivot].conj() / best
        } else {
            ONE
        };
        for i in 0..d {
            basis[(i, col)] = v[i] * phase;
        }
    }
    (energies, basis)
}

impl RedfieldGenerator {
    /// Diagonalizes `h`, rotates every coupling operator into the eigenbasis
    /// and tabulates the rates at all Bohr frequencies.
    pub fn build(h: &ComplexMatrix, couplings: &[Coupling]) -> Result<Self> {
        let d = h.nrows();
        if d == 0 || h.ncols() != d {
            return Err(invalid("Hamiltonian must be a non-empty square matrix"));
        }
        if !is_hermitian(h, hermitian_tolerance(h)) {
            return Err(Error::NotHermitian {
                deviation: hermitian_deviation(h),
            });
        }
        let (energies, basis) = canonical_eigen(h);
        let mut baths = Vec::with_capacity(couplings.len());
        for c in couplings {
            let op = &c.operator;
            if op.nrows() != d || op.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: op.nrows(),
                });
            }
            if !is_hermitian(op, hermitian_tolerance(op)) {
                return Err(Error::NotHermitian {
                    deviation: hermitian_deviation(op),
                });
            }
            if !(c.temperature >= 0.0) || !c.temperature.is_finite() {
                return Err(invalid(format!(
                    "bath temperature must be >= 0, got {}",
                    c.temperature
                )));
            }
            let s = matmul(&matmul(&basis.adjoint(), op), &basis);
            let s = (&s + s.adjoint()) * C64::new(0.5, 0.0);
            let mut rates = DMatrix::<f64>::zeros(d, d);
            let zero_rate = rate_gamma_or_zero_temperature(&c.density, 0.0, c.temperature)?;
            for l in 0..d {
                for j in 0..d {
                    let w = energies[l] - energies[j];
                    rates[(j, l)] = if w.abs() < DEGENERACY_TOL {
                        zero_rate
                    } else {
                        rate_gamma_or_zero_temperature(&c.density, w, c.temperature)?
                    };
                }
            }
            let x = ComplexMatrix::from_fn(d, d, |j, l| s[(j, l)] * rates[(j, l)]);
            let k = matmul(&s, &x);
            baths.push(BathTerm { s, x, k, rates });
        }
        let mut gen = Self {
            energies,
            basis,
            baths,
            norm_estimate: 0.0,
        };
        gen.norm_estimate = gen.estimate_norm();
        Ok(gen)
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Hamiltonian eigenvalues, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors of the Hamiltonian as columns.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn bath_count(&self) -> usize {
        self.baths.len()
    }

    /// `Γ(ω_l − ω_j)` at entry `(j, l)` for bath `index`.
    pub fn rate_table(&self, index: usize) -> &DMatrix<f64> {
        &self.baths[index].rates
    }

    /// Coupling operator of bath `index` in the eigenbasis.
    pub fn coupling_eigenbasis(&self, index: usize) -> &ComplexMatrix {
        &self.baths[index].s
    }

    /// Estimate of the largest eigenvalue magnitude of the generator.
    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    /// Site-basis operator expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        matmul(&matmul(&self.basis.adjoint(), m), &self.basis)
    }

    /// Eigenbasis operator expressed in the site basis.
    pub fn to_site_basis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        matmul(&matmul(&self.basis, m), &self.basis.adjoint())
    }

    /// `dρ/dt` for an arbitrary (not necessarily Hermitian) site-basis matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim();
        if rho.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.nrows(),
            });
        }
        let r = self.to_eigenbasis(rho);
        let out = self.apply_eigen_general(&r);
        Ok(self.to_site_basis(&out))
    }

    fn apply_eigen_general(&self, r: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim();
        let mut out = self.unitary_part(r);
        let mut acc = ComplexMatrix::zeros(d, d);
        let mut t = ComplexMatrix::zeros(d, d);
        for bath in &self.baths {
            let kd = bath.k.adjoint();
            let xd = bath.x.adjoint();
            gemm_into(&mut acc, ONE, &bath.k, r, ZERO);
            gemm_into(&mut acc, ONE, r, &kd, ONE);
            gemm_into(&mut t, ONE, &bath.x, r, ZERO);
            gemm_into(&mut acc, -ONE, &t, &bath.s, ONE);
            gemm_into(&mut t, ONE, &bath.s, r, ZERO);
            gemm_into(&mut acc, -ONE, &t, &xd, ONE);
            out -= &acc;
        }
        out
    }

    fn unitary_part(&self, r: &ComplexMatrix) -> ComplexMatrix {
        let e = &self.energies;
        ComplexMatrix::from_fn(r.nrows(), r.ncols(), |m, n| {
            C64::new(0.0, -(e[m] - e[n])) * r[(m, n)]
        })
    }

    /// Eigenbasis application for Hermitian input; the output is Hermitian
    /// to the last bit because only `D + D†` combinations are accumulated.
    fn apply_eigen_hermitian(
        &self,
        r: &ComplexMatrix,
        out: &mut ComplexMatrix,
        ws: &mut Workspace,
    ) {
        let d = self.dim();
        let e = &self.energies;
        for n in 0..d {
            for m in 0..d {
                out[(m, n)] = C64::new(0.0, -(e[m] - e[n])) * r[(m, n)];
            }
        }
        for bath in &self.baths {
            gemm_into(&mut ws.b, ONE, &bath.k, r, ZERO);
            gemm_into(&mut ws.t, ONE, &bath.x, r, ZERO);
            gemm_into(&mut ws.b, -ONE, &ws.t, &bath.s, ONE);
            for n in 0..d {
                for m in 0..d {
                    out[(m, n)] -= ws.b[(m, n)] + ws.b[(n, m)].conj();
                }
            }
        }
    }

    fn estimate_norm(&self) -> f64 {
        let d = self.dim();
        let spread = match (self.energies.first(), self.energies.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        };
        if self.baths.is_empty() {
            return spread;
        }
        let mut x = ComplexMatrix::from_fn(d, d, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            let re = (0.37 * a + 0.61 * b + 0.1).sin();
            let im = if i == j {
                0.0
            } else {
                (0.53 * a - 0.29 * b).cos()
            };
            if i <= j {
                C64::new(re, im)
            } else {
                C64::new(re, -im)
            }
        });
        let mut y = ComplexMatrix::zeros(d, d);
        let mut ws = Workspace::new(d);
        let mut best: f64 = 0.0;
        for _ in 0..40 {
            let nx = x.norm();
            if nx == 0.0 {
                break;
            }
            x /= C64::new(nx, 0.0);
            self.apply_eigen_hermitian(&x, &mut y, &mut ws);
            best = best.max(y.norm());
            std::mem::swap(&mut x, &mut y);
        }
        best.max(spread)
    }
}

/// Builds the generator; see [`RedfieldGenerator::build`].
pub fn build_generator(h: &ComplexMatrix, couplings: &[Coupling]) -> Result<RedfieldGenerator> {
    RedfieldGenerator::build(h, couplings)
}

/// `dρ/dt` for a site-basis matrix; see [`RedfieldGenerator::apply`].
pub fn apply_generator(gen: &RedfieldGenerator, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    gen.apply(rho)
}

/// Step-size control for [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Upper bound on the RK4 step, normally `0.01/Δ`.
    pub max_step: f64,
    /// Forces this step size instead of the automatic choice.
    pub fixed_step: Option<f64>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            max_step: 0.01,
            fixed_step: None,
        }
    }
}

impl PropagationOptions {
    pub fn with_max_step(max_step: f64) -> Self {
        Self {
            max_step,
            fixed_step: None,
        }
    }

    pub fn fixed(step: f64) -> Self {
        Self {
            max_step: step,
            fixed_step: Some(step),
        }
    }

    /// The step the integrator will use for `gen`.
    pub fn step_for(&self, gen: &RedfieldGenerator) -> f64 {
        if let Some(h) = self.fixed_step {
            return h;
        }
        let g = gen.norm_estimate();
        if g > 0.0 {
            self.max_step.min(0.1 / g)
        } else {
            self.max_step
        }
    }
}

/// Qubit observables at one output time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub sx: f64,
    pub sz: f64,
    pub re_rho12: f64,
    pub im_rho12: f64,
    pub trace_err: f64,
}

impl Observables {
    fn from_qubit(m: &ComplexMatrix, trace_err: f64) -> Self {
        let rho12 = m[(1, 0)];
        Self {
            sx: 2.0 * rho12.re,
            sz: m[(0, 0)].re - m[(1, 1)].re,
            re_rho12: rho12.re,
            im_rho12: rho12.im,
            trace_err,
        }
    }
}

/// Reduced qubit dynamics sampled at the requested times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub observables: Vec<Observables>,
    /// RK4 step actually used.
    pub step: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sx(&self) -> Vec<f64> {
        self.observables.iter().map(|o| o.sx).collect()
    }

    pub fn max_trace_error(&self) -> f64 {
        self.observables
            .iter()
            .map(|o| o.trace_err)
            .fold(0.0, f64::max)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.first() {
        None => return Err(invalid("at least one output time is required")),
        Some(&t0) if t0 != 0.0 => return Err(invalid("output times must start at 0")),
        _ => {}
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(
            "output times must be finite and strictly increasing",
        ));
    }
    Ok(())
}

/// Integrates `rho0` with fixed-step RK4 and records the reduced qubit state
/// at every entry of `times`.
pub fn propagate(
    gen: &RedfieldGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    options: &PropagationOptions,
) -> Result<Trajectory> {
    let d = gen.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho0.dim(),
        });
    }
    if rho0.dims().first() != Some(&2) {
        return Err(invalid(
            "the first subsystem of the initial state must be the qubit",
        ));
    }
    check_times(times)?;
    let h = options.step_for(gen);
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("step size must be positive, got {h}")));
    }

    let dims = rho0.dims().to_vec();
    let mut y = gen.to_eigenbasis(rho0.matrix());
    let adj = y.adjoint();
    y = (&y + adj) * C64::new(0.5, 0.0);
    let mut k = ComplexMatrix::zeros(d, d);
    let mut acc = ComplexMatrix::zeros(d, d);
    let mut stage = ComplexMatrix::zeros(d, d);
    let mut ws = Workspace::new(d);

    let mut traj = Trajectory {
        times: Vec::with_capacity(times.len()),
        states: Vec::with_capacity(times.len()),
        observables: Vec::with_capacity(times.len()),
        step: h,
    };
    let record = |t: f64, y: &ComplexMatrix, traj: &mut Trajectory| -> Result<()> {
        let full = gen.to_site_basis(y);
        let tr = crate::qcore::trace(&full);
        let trace_err = (tr - ONE).norm();
        if !(trace_err <= TRACE_FAILURE) {
            return Err(Error::Integrator {
                time: t,
                reason: format!("trace error {trace_err:.3e}"),
            });
        }
        let reduced = partial_trace_to_qubit(&DensityMatrix::new_unchecked(full, dims.clone()))?;
        let low = reduced.min_eigenvalue();
        if !(low >= POSITIVITY_FAILURE) {
            return Err(Error::Integrator {
                time: t,
                reason: format!("qubit eigenvalue {low:.3e} below {POSITIVITY_FAILURE:e}"),
            });
        }
        traj.observables
            .push(Observables::from_qubit(reduced.matrix(), trace_err));
        traj.states.push(reduced);
        traj.times.push(t);
        Ok(())
    };

    record(0.0, &y, &mut traj)?;
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let n = ((span / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let hs = span / n as f64;
        let half = C64::new(0.5 * hs, 0.0);
        let full = C64::new(hs, 0.0);
        let sixth = C64::new(hs / 6.0, 0.0);
        for _ in 0..n {
            gen.apply_eigen_hermitian(&y, &mut k, &mut ws);
            acc.copy_from(&k);
            stage.copy_from(&y);
            stage.zip_apply(&k, |s, kv| *s += half * kv);
            gen.apply_eigen_hermitian(&stage, &mut k, &mut ws);
            acc.zip_apply(&k, |a, kv| *a += 2.0 * kv);
            stage.copy_from(&y);
            stage.zip_apply(&k, |s, kv| *s += half * kv);
            gen.apply_eigen_hermitian(&stage, &mut k, &mut ws);
            acc.zip_apply(&k, |a, kv| *a += 2.0 * kv);
            stage.copy_from(&y);
            stage.zip_apply(&k, |s, kv| *s += full * kv);
            gen.apply_eigen_hermitian(&stage, &mut k, &mut ws);
            y.zip_zip_apply(&acc, &k, |yv, a, kv| *yv += sixth * a + sixth * kv);
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Integrator {
                time: w[1],
                reason: "state became non-finite".into(),
            });
        }
        record(w[1], &y, &mut traj)?;
    }
    Ok(traj)
}

/// Unique stationary state of the generator.
///
/// The superoperator is assembled column by column and its null space read
/// off a singular value decomposition, which also exposes degenerate
/// stationary manifolds.
pub fn steady_state(gen: &RedfieldGenerator) -> Result<DensityMatrix> {
    let d = gen.dim();
    if d > MAX_STEADY_STATE_DIM {
        return Err(invalid(format!(
            "steady state supports dimension <= {MAX_STEADY_STATE_DIM}, got {d}"
        )));
    }
    let n = d * d;
    let mut sup = ComplexMatrix::zeros(n, n);
    let mut unit = ComplexMatrix::zeros(d, d);
    for col in 0..n {
        let (i, j) = (col % d, col / d);
        unit[(i, j)] = ONE;
        let image = gen.apply_eigen_general(&unit);
        unit[(i, j)] = ZERO;
        for (row, v) in image.iter().enumerate() {
            sup[(row, col)] = *v;
        }
    }
    let svd = sup.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    let largest = sv[order[n - 1]].max(f64::MIN_POSITIVE);
    if n > 1 && sv[order[1]] <= 1e-10 * largest {
        return Err(Error::NonUniqueSteadyState(format!(
            "second smallest singular value {:.3e} of {:.3e}",
            sv[order[1]], largest
        )));
    }
    let null = v_t.row(order[0]);
    let mut r = ComplexMatrix::from_fn(d, d, |i, j| null[i + j * d].conj());
    let tr = crate::qcore::trace(&r);
    if tr.norm() < 1e-12 {
        return Err(Error::NonUniqueSteadyState(
            "null vector is traceless".into(),
        ));
    }
    r /= tr;
    let adj = r.adjoint();
    r = (&r + adj) * C64::new(0.5, 0.0);
    let residual = gen
        .apply_eigen_general(&r)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > 1e-8 {
        return Err(Error::Integrator {
            time: f64::INFINITY,
            reason: format!("stationary residual {residual:.3e}"),
        });
    }
    let site = gen.to_site_basis(&r);
    let site = (&site + site.adjoint()) * C64::new(0.5, 0.0);
    let dims = if d.is_multiple_of(2) && d > 2 {
        vec![2, d / 2]
    } else {
        vec![d]
    };
    DensityMatrix::new(site, dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{identity, pauli, plus_state, qubit_state, BathAxis};
    use crate::spectral::rate_gamma;
    use std::f64::consts::PI;

    const GAMMA: f64 = 0.05 / PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ohmic() -> SpectralDensity {
        SpectralDensity::Ohmic {
            gamma: GAMMA,
            cutoff: 1000.0,
        }
    }

    fn qubit_h(delta: f64, e: f64) -> ComplexMatrix {
        pauli(BathAxis::Z) * c(delta) + pauli(BathAxis::X) * c(e)
    }

    fn pseudo_random(d: usize, seed: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(d, d, |i, j| {
            C64::new(
                (seed + 1.3 * i as f64 + 2.9 * j as f64).sin(),
                (seed * 0.7 + 0.4 * i as f64 - 1.1 * j as f64).cos(),
            )
        })
    }

    fn hermitian_random(d: usize, seed: f64) -> ComplexMatrix {
        let a = pseudo_random(d, seed);
        (&a + a.adjoint()) * c(0.5)
    }

    fn max_abs(m: &ComplexMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Index-by-index evaluation of the Redfield right-hand side.
    fn brute_force(
        energies: &[f64],
        s: &ComplexMatrix,
        j: &SpectralDensity,
        t: f64,
        r: &ComplexMatrix,
    ) -> ComplexMatrix {
        let d = energies.len();
        let g = |a: usize, b: usize| {
            let w = energies[b] - energies[a];
            rate_gamma(j, if w.abs() < DEGENERACY_TOL { 0.0 } else { w }, t).unwrap()
        };
        ComplexMatrix::from_fn(d, d, |m, n| {
            let mut acc = C64::new(0.0, -(energies[m] - energies[n])) * r[(m, n)];
            for a in 0..d {
                for b in 0..d {
                    acc -= s[(m, a)] * s[(a, b)] * g(a, b) * r[(b, n)];
                    acc += s[(m, a)] * g(m, a) * r[(a, b)] * s[(b, n)];
                    acc += s[(m, a)] * r[(a, b)] * s[(n, b)].conj() * g(n, b);
                    acc -= r[(m, a)] * (s[(b, a)] * g(b, a)).conj() * s[(b, n)];
                }
            }
            acc
        })
    }

    #[test]
    fn matches_index_form() {
        let h = ComplexMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                c(i as f64 * 0.8 - 1.0)
            } else {
                c(0.0)
            }
        }) + hermitian_random(4, 0.3) * c(0.2);
        let s = hermitian_random(4, 1.7);
        let j = SpectralDensity::Brownian {
            lambda: 0.6,
            omega: 2.0,
            gamma: 0.05,
        };
        let gen = build_generator(&h, &[Coupling::new(s, j, 0.7)]).unwrap();
        let r = pseudo_random(4, 2.2);
        let fast = gen.apply_eigen_general(&r);
        let slow = brute_force(gen.energies(), gen.coupling_eigenbasis(0), &j, 0.7, &r);
        assert!(max_abs(&(fast - slow)) < 1e-12);
    }

    #[test]
    fn hermitian_path_matches_general_path() {
        let h = hermitian_random(5, 0.9);
        let gen = build_generator(
            &h,
            &[
                Coupling::new(hermitian_random(5, 3.1), ohmic(), 1.0),
                Coupling::new(hermitian_random(5, 4.4), ohmic(), 0.3),
            ],
        )
        .unwrap();
        let r = hermitian_random(5, 6.0);
        let mut out = ComplexMatrix::zeros(5, 5);
        gen.apply_eigen_hermitian(&r, &mut out, &mut Workspace::new(5));
        assert!(max_abs(&(out.clone() - gen.apply_eigen_general(&r))) < 1e-12);
        assert_eq!(out.clone(), out.adjoint());
    }

    #[test]
    fn decoupled_is_unitary() {
        let h = qubit_h(1.0, 0.4);
        let gen = build_generator(
            &h,
            &[Coupling::new(ComplexMatrix::zeros(2, 2), ohmic(), 1.0)],
        )
        .unwrap();
        let r = pseudo_random(2, 0.5);
        let expected = (&h * &r - &r * &h) * C64::new(0.0, -1.0);
        assert!(max_abs(&(gen.apply(&r).unwrap() - expected)) < 1e-12);
    }

    #[test]
    fn pure_dephasing_rates() {
        let gen = build_generator(
            &qubit_h(1.0, 0.0),
            &[Coupling::new(pauli(BathAxis::Z), ohmic(), 1.0)],
        )
        .unwrap();
        let rho = plus_state();
        let d = gen.apply(rho.matrix()).unwrap();
        assert!(d[(0, 0)].norm() < 1e-15 && d[(1, 1)].norm() < 1e-15);
        let rho12 = rho.matrix()[(1, 0)];
        let expected = rho12 * C64::new(-4.0 * PI * GAMMA, 2.0);
        assert!((d[(1, 0)] - expected).norm() < 1e-14);
    }

    #[test]
    fn trace_and_hermiticity() {
        let gen = build_generator(
            &hermitian_random(6, 0.1),
            &[Coupling::new(hermitian_random(6, 2.0), ohmic(), 0.5)],
        )
        .unwrap();
        let r = hermitian_random(6, 9.0);
        let out = gen.apply(&r).unwrap();
        assert!(crate::qcore::trace(&out).norm() < 1e-12);
        let g = pseudo_random(6, 1.0);
        let lhs = gen.apply(&g).unwrap().adjoint();
        let rhs = gen.apply(&g.adjoint()).unwrap();
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_stationary_for_commuting_coupling() {
        let gen = build_generator(
            &qubit_h(1.0, 0.0),
            &[Coupling::new(pauli(BathAxis::Z), ohmic(), 1.0)],
        )
        .unwrap();
        let out = gen.apply(&(identity(2) * c(0.5))).unwrap();
        assert!(max_abs(&out) < 1e-12);
    }

    #[test]
    fn gibbs_state_nearly_stationary() {
        let h = qubit_h(1.0, 0.5);
        let t = 1.0;
        let gen = build_generator(&h, &[Coupling::new(pauli(BathAxis::X), ohmic(), t)]).unwrap();
        let e = gen.energies();
        let z: f64 = e.iter().map(|v| (-v / t).exp()).sum();
        let diag = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c((-e[i] / t).exp() / z)
            } else {
                c(0.0)
            }
        });
        let gibbs = gen.to_site_basis(&diag);
        let out = gen.apply(&gibbs).unwrap();
        assert!(max_abs(&out) <= 1e-3 * gen.norm_estimate());
        // Redistributing population away from Gibbs must produce a restoring flow.
        let hot = gen.to_site_basis(&(identity(2) * c(0.5)));
        let flow = gen.to_eigenbasis(&gen.apply(&hot).unwrap());
        assert!(flow[(0, 0)].re > 0.0);
    }

    #[test]
    fn baths_are_additive() {
        let h = hermitian_random(4, 0.2);
        let a = Coupling::new(hermitian_random(4, 1.0), ohmic(), 0.4);
        let b = Coupling::new(
            hermitian_random(4, 5.0),
            SpectralDensity::Brownian {
                lambda: 0.5,
                omega: 3.0,
                gamma: 0.02,
            },
            1.5,
        );
        let both = build_generator(&h, &[a.clone(), b.clone()]).unwrap();
        let ga = build_generator(&h, &[a]).unwrap();
        let gb = build_generator(&h, &[b]).unwrap();
        let bare = build_generator(&h, &[]).unwrap();
        let r = pseudo_random(4, 3.3);
        let lhs = both.apply(&r).unwrap();
        let rhs = ga.apply(&r).unwrap() + gb.apply(&r).unwrap() - bare.apply(&r).unwrap();
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn eigen_convention() {
        let h = hermitian_random(5, 1.1);
        let gen = build_generator(&h, &[]).unwrap();
        assert!(gen.energies().windows(2).all(|w| w[0] <= w[1]));
        for col in 0..5 {
            let v = gen.basis().column(col);
            let (idx, _) = v.iter().enumerate().fold((0, -1.0), |acc, (i, z)| {
                if z.norm() > acc.1 {
                    (i, z.norm())
                } else {
                    acc
                }
            });
            assert!(v[idx].im.abs() < 1e-14 && v[idx].re > 0.0);
        }
        let again = build_generator(&h, &[]).unwrap();
        assert_eq!(gen.basis(), again.basis());
    }

    #[test]
    fn rejects_bad_input() {
        let bad = pseudo_random(2, 0.0);
        assert!(matches!(
            build_generator(&bad, &[]),
            Err(Error::NotHermitian { .. })
        ));
        let h = qubit_h(1.0, 0.0);
        assert!(build_generator(&h, &[Coupling::new(bad, ohmic(), 1.0)]).is_err());
        assert!(matches!(
            build_generator(&h, &[Coupling::new(identity(3), ohmic(), 1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn free_precession() {
        let gen = build_generator(&qubit_h(1.0, 0.0), &[]).unwrap();
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let traj = propagate(&gen, &plus_state(), &times, &PropagationOptions::default()).unwrap();
        for (t, o) in times.iter().zip(&traj.observables) {
            assert!(
                (o.sx - (2.0 * t).cos()).abs() < 1e-7,
                "{t} {} {}",
                o.sx,
                (2.0 * t).cos()
            );
            assert!(
                (o.im_rho12 - 0.5 * (2.0 * t).sin()).abs() < 1e-7,
                "{t} {}",
                o.im_rho12
            );
        }
    }

    #[test]
    fn dephasing_envelope() {
        let t = 1.0;
        let gen = build_generator(
            &qubit_h(1.0, 0.0),
            &[Coupling::new(pauli(BathAxis::Z), ohmic(), t)],
        )
        .unwrap();
        let times: Vec<f64> = (0..=50).map(|i| i as f64 * 0.2).collect();
        let traj = propagate(&gen, &plus_state(), &times, &PropagationOptions::default()).unwrap();
        for (tt, o) in times.iter().zip(&traj.observables) {
            let expected = (-4.0 * PI * GAMMA * t * tt).exp() * (2.0 * tt).cos();
            assert!((o.sx - expected).abs() < 1e-8, "{tt} {} {expected}", o.sx);
            assert!(o.trace_err < 1e-12);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let gen = build_generator(
            &qubit_h(1.0, 0.6),
            &[Coupling::new(pauli(BathAxis::X), ohmic(), 0.5)],
        )
        .unwrap();
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.4).collect();
        let rho0 = qubit_state(0.8, C64::new(0.3, 0.1)).unwrap();
        let run = |h: f64| {
            propagate(&gen, &rho0, &times, &PropagationOptions::fixed(h))
                .unwrap()
                .sx()
        };
        let reference = run(0.2 / 4.0);
        let err = |v: Vec<f64>| {
            v.iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let coarse = err(run(0.2));
        let fine = err(run(0.1));
        assert!(coarse / fine >= 12.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn rejects_bad_times() {
        let gen = build_generator(&qubit_h(1.0, 0.0), &[]).unwrap();
        let opts = PropagationOptions::default();
        assert!(propagate(&gen, &plus_state(), &[0.1, 0.2], &opts).is_err());
        assert!(propagate(&gen, &plus_state(), &[0.0, 0.2, 0.2], &opts).is_err());
    }

    #[test]
    fn steady_state_cases() {
        let t = 0.5;
        let gen = build_generator(
            &qubit_h(1.0, 0.0),
            &[Coupling::new(pauli(BathAxis::X), ohmic(), t)],
        )
        .unwrap();
        let ss = steady_state(&gen).unwrap();
        let (rho11, rho12) = crate::qcore::qubit_elements(ss.matrix());
        let expected = (2.0 / t).exp() / ((2.0 / t).exp() + 1.0);
        assert!((rho11 - expected).abs() < 1e-9);
        assert!(rho12.norm() < 1e-12);

        // Far above the level splitting the populations equalize.
        let hot = build_generator(
            &qubit_h(1.0, 0.0),
            &[Coupling::new(pauli(BathAxis::X), ohmic(), 1e3)],
        )
        .unwrap();
        let (p, _) = crate::qcore::qubit_elements(steady_state(&hot).unwrap().matrix());
        assert!((p - 0.5).abs() < 1.1e-3);

        let deph = build_generator(
            &qubit_h(1.0, 0.0),
            &[Coupling::new(pauli(BathAxis::Z), ohmic(), t)],
        )
        .unwrap();
        assert!(matches!(
            steady_state(&deph),
            Err(Error::NonUniqueSteadyState(_))
        ));
    }
}
