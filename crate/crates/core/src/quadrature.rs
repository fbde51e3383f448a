//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//!
//! Error estimation follows the QUADPACK `qk15` heuristic: the raw
//! Kronrod-Gauss difference is rescaled by the integrand's mean absolute
//! deviation and floored at a few ulps of the absolute integral.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the 7-point rule living on XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

/// Stopping rule for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    /// Maximum number of subintervals held at once.
    pub budget: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn absolute(abs: T) -> Self {
        Self {
            abs,
            rel: T::lit(100.0) * T::epsilon(),
            budget: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut gauss = fc * T::lit(WG[3]);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut resabs = fc.abs() * T::lit(WGK[7]);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += T::lit(WGK[j]) * (f1 + f2);
        resabs += T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = kronrod * half;
    let mut resasc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        resasc += T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half_len;
    let resabs = resabs * abs_half;
    let resasc = resasc * abs_half;
    let mut error = ((kronrod - gauss) * half_len).abs();
    if resasc > T::zero() && error > T::zero() {
        let scaled = (T::lit(200.0) * error / resasc).powf(T::lit(1.5));
        error = resasc * scaled.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(floor);
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over the finite interval `[a, b]`.
///
/// Intervals are bisected in order of decreasing error estimate until the
/// summed estimate falls below `max(tol.abs, tol.rel * |value|)`.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    tol: Tolerance<T>,
) -> Result<Estimate<T>> {
    let mut segments = vec![kronrod15(&f, a, b)];
    loop {
        let value: T = segments.iter().map(|s| s.value).sum();
        let error: T = segments.iter().map(|s| s.error).sum();
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(Estimate {
                value,
                error,
                intervals: segments.len(),
            });
        }
        if segments.len() >= tol.budget {
            return Err(Error::Convergence {
                tol: target.to_f64_lossy(),
                estimate: error.to_f64_lossy(),
                budget: tol.budget,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|(_, l), (_, r)| {
                l.error
                    .partial_cmp(&r.error)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // interval exhausted at working precision
            return Err(Error::Convergence {
                tol: target.to_f64_lossy(),
                estimate: error.to_f64_lossy(),
                budget: tol.budget,
            });
        }
        segments.push(kronrod15(&f, seg.a, mid));
        segments.push(kronrod15(&f, mid, seg.b));
    }
}
