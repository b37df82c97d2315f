//! Dense complex linear algebra on qubit ⊗ reaction-coordinate spaces.
//!
//! Composite spaces are always ordered qubit first, followed by one truncated
//! oscillator per active bath in declaration order. Every other module relies
//! on this ordering when it embeds operators or traces out oscillators.

use std::fmt;
use std::str::FromStr;

use matrixmultiply::CGemmOption;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

/// Dense complex square matrix, stored column-major.
pub type ComplexMatrix = DMatrix<C64>;

/// Elementwise tolerance for Hermiticity checks on operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace and Hermiticity tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density matrix.
pub const POSITIVITY_TOL: f64 = -1e-8;

/// Spin orientation along which a bath couples to the qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BathAxis {
    X,
    Y,
    Z,
}

impl BathAxis {
    pub const ALL: [BathAxis; 3] = [BathAxis::X, BathAxis::Y, BathAxis::Z];

    pub fn index(self) -> usize {
        match self {
            BathAxis::X => 0,
            BathAxis::Y => 1,
            BathAxis::Z => 2,
        }
    }
}

impl fmt::Display for BathAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BathAxis::X => "x",
            BathAxis::Y => "y",
            BathAxis::Z => "z",
        };
        f.write_str(s)
    }
}

impl FromStr for BathAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(BathAxis::X),
            "y" => Ok(BathAxis::Y),
            "z" => Ok(BathAxis::Z),
            other => Err(invalid(format!("unknown bath axis '{other}'"))),
        }
    }
}

/// The 2×2 Pauli matrix for `axis`, in the σ^z eigenbasis (|↑⟩ first).
pub fn pauli(axis: BathAxis) -> ComplexMatrix {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match axis {
        BathAxis::X => ComplexMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        BathAxis::Y => ComplexMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        BathAxis::Z => ComplexMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    }
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Truncated bosonic annihilation operator on `levels` Fock states.
pub fn annihilation(levels: usize) -> Result<ComplexMatrix> {
    if levels == 0 {
        return Err(invalid(
            "oscillator truncation must keep at least one level",
        ));
    }
    let mut a = ComplexMatrix::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Embed `op` acting on subsystem `slot` of a composite space with the given
/// subsystem dimensions, with identities everywhere else.
pub fn embed(op: &ComplexMatrix, slot: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    if slot >= dims.len() {
        return Err(invalid(format!(
            "slot {slot} out of range for {} subsystems",
            dims.len()
        )));
    }
    if op.nrows() != dims[slot] || op.ncols() != dims[slot] {
        return Err(Error::DimensionMismatch {
            expected: dims[slot],
            found: op.nrows(),
        });
    }
    let left: usize = dims[..slot].iter().product();
    let right: usize = dims[slot + 1..].iter().product();
    let mut out = kron(&identity(left), op);
    out = kron(&out, &identity(right));
    Ok(out)
}

/// Largest elementwise deviation `max |A − A†|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && hermitian_deviation(m) <= tol
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// `c ← alpha·a·b + beta·c` for square column-major matrices.
pub(crate) fn gemm_into(
    c: &mut ComplexMatrix,
    alpha: C64,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    beta: C64,
) {
    let (m, k) = a.shape();
    let (k2, n) = b.shape();
    assert_eq!(k, k2, "inner dimensions differ");
    assert_eq!(c.shape(), (m, n), "output shape differs");
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: Complex<f64> is repr(C) with layout identical to [f64; 2]; the
    // slices are dense column-major buffers of exactly the advertised shape
    // and `c` does not alias `a` or `b` (it is borrowed mutably).
    unsafe {
        matrixmultiply::zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [beta.re, beta.im],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
}

/// Matrix product `a·b` through the blocked complex GEMM kernel.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(a.nrows(), b.ncols());
    gemm_into(&mut c, C64::new(1.0, 0.0), a, b, C64::new(0.0, 0.0));
    c
}

/// A validated density matrix on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity and positivity before accepting `matrix`.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        let tr = trace(&matrix);
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let min_ev = hermitian_eigenvalues(&matrix)[0];
        if min_ev < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// A qubit state from its matrix elements in the σ^z basis.
    pub fn qubit(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix, vec![2])
    }

    /// Wraps a matrix without validation; used for intermediate integrator states.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        trace(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)[0]
    }

    /// `self ⊗ other`, concatenating subsystem lists.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            matrix: kron(&self.matrix, &other.matrix),
            dims,
        }
    }
}

fn check_dims(matrix: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !matrix.is_square() {
        return Err(invalid("density matrix must be square"));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(invalid("subsystem dimensions must be positive"));
    }
    let total: usize = dims.iter().product();
    if total != matrix.nrows() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: matrix.nrows(),
        });
    }
    Ok(())
}

/// Thermal state of a truncated oscillator with frequency `omega` at
/// temperature `temperature` (in energy units), renormalized over `levels`.
pub fn thermal_rc_state(omega: f64, temperature: f64, levels: usize) -> Result<DensityMatrix> {
    if !(omega > 0.0) {
        return Err(invalid(format!(
            "oscillator frequency must be positive, got {omega}"
        )));
    }
    if !(temperature >= 0.0) {
        return Err(invalid(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    if levels == 0 {
        return Err(invalid(
            "oscillator truncation must keep at least one level",
        ));
    }
    let weights: Vec<f64> = if temperature == 0.0 {
        (0..levels)
            .map(|n| if n == 0 { 1.0 } else { 0.0 })
            .collect()
    } else {
        (0..levels)
            .map(|n| (-(n as f64) * omega / temperature).exp())
            .collect()
    };
    let z: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(levels, levels);
    for (n, w) in weights.iter().enumerate() {
        m[(n, n)] = C64::new(w / z, 0.0);
    }
    Ok(DensityMatrix::new_unchecked(m, vec![levels]))
}

/// Trace out every subsystem except the leading qubit.
pub fn partial_trace_to_qubit(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dims.first() != Some(&2) {
        return Err(invalid("first subsystem must be a qubit"));
    }
    let rest = rho.dim() / 2;
    let m = &rho.matrix;
    let mut out = ComplexMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..rest {
                acc += m[(a * rest + r, b * rest + r)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::new_unchecked(out, vec![2]))
}

/// `tr(op · ρ)`.
pub fn expectation(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<C64> {
    expectation_raw(op, &rho.matrix)
}

pub(crate) fn expectation_raw(op: &ComplexMatrix, rho: &ComplexMatrix) -> Result<C64> {
    if op.shape() != rho.shape() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            found: op.nrows(),
        });
    }
    let n = op.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += op[(i, j)] * rho[(j, i)];
        }
    }
    Ok(acc)
}

/// Qubit state with populations `rho11`, `1 − rho11` and coherence `rho12`.
///
/// Level 1 is the σ^z = −1 state (the ground state for Δ > 0) and level 2 is
/// σ^z = +1, so `rho12 = ⟨↓|ρ|↑⟩`.
pub fn qubit_state(rho11: f64, rho12: C64) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(1, 1)] = C64::new(rho11, 0.0);
    m[(0, 0)] = C64::new(1.0 - rho11, 0.0);
    m[(1, 0)] = rho12;
    m[(0, 1)] = rho12.conj();
    DensityMatrix::qubit(m)
}

/// The initial qubit state used throughout: ρ11 = ρ22 = ρ12 = ρ21 = 1/2.
pub fn plus_state() -> DensityMatrix {
    qubit_state(0.5, C64::new(0.5, 0.0)).expect("|+⟩⟨+| is a valid state")
}

/// `(ρ11, ρ12)` of a qubit matrix in the labelling of [`qubit_state`].
pub fn qubit_elements(m: &ComplexMatrix) -> (f64, C64) {
    (m[(1, 1)].re, m[(1, 0)])
}
