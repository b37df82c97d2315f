//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and work limit for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-8,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// The interval with the largest local error estimate is bisected until the
/// summed estimate drops below `max(tol.abs, tol.rel·|I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_partitioned(f, a, b, 1, tol)
}

/// Like [`integrate`], but starts from `pieces` equal subintervals so that
/// narrow features cannot slip between the nodes of a single coarse rule.
pub fn integrate_partitioned<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    pieces: usize,
    tol: Tolerance,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite interval [{a}, {b}]")));
    }
    let pieces = pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + width };
        let (v, e) = kronrod15(&mut f, lo, hi);
        value += v;
        error += e;
        heap.push(Segment {
            a: lo,
            b: hi,
            value: v,
            error: e,
        });
    }
    let mut total = value;
    let mut total_err = error;
    let mut count = pieces;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature(
                "integrand produced non-finite values".into(),
            ));
        }
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            break;
        }
        if count >= tol.max_intervals.max(pieces) {
            return Err(Error::Quadrature(format!(
                "error estimate {total_err:.3e} above tolerance after {count} subintervals"
            )));
        }
        let seg = heap.pop().expect("heap never empties");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(Error::Quadrature("interval underflow".into()));
        }
        let (v1, e1) = kronrod15(&mut f, seg.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
        count += 1;
    }
    // Re-sum to shed the drift accumulated by the incremental updates.
    let (mut value, mut error) = (0.0, 0.0);
    for seg in heap.iter() {
        value += seg.value;
        error += seg.error;
    }
    Ok(Estimate { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let est = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((est.value - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let est = integrate(|x| (50.0 * x).cos(), 0.0, PI, Tolerance::new(1e-13, 1e-13)).unwrap();
        assert!(est.value.abs() < 1e-12);
        let w = 1e-3;
        let lorentz = integrate(
            |x| w / (x * x + w * w),
            -1.0,
            1.0,
            Tolerance::new(1e-12, 1e-12),
        )
        .unwrap();
        assert!((lorentz.value - 2.0 * (1.0 / w).atan()).abs() < 1e-10);
    }

    #[test]
    fn reports_failure() {
        let tol = Tolerance {
            abs: 1e-14,
            rel: 0.0,
            max_intervals: 3,
        };
        assert!(integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, tol).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, Tolerance::default()).is_err());
    }
}
