//! Radiative correlation functions for parallel dipoles.
//!
//! All arguments are dimensionless, `x = k_eg * R = 2π R / λ_eg`. The
//! returned values are in units of the single-atom decay rate Γ.
//!
//! * `d1` - decay correlation, bounded by its `x -> 0` limit 1.
//! * `s_exact` - level-shift correlation including the retarded integral.
//! * `s_approx` - closed-form approximation of the same integral.
//! * [`Kernel::eval`] - the combined `M = S + i D1` entering the channel matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::scalar::{cplx, Real, C};

/// Below this argument the series expansions replace the closed forms.
pub const SERIES_SWITCH: f64 = 1e-3;

/// Default absolute tolerance on `s_exact`.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Subdivision budget for each half of the shift integral.
pub const QUADRATURE_BUDGET: usize = 4000;

fn check_domain<T: Real>(x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(x.to_f64_lossy()))
    }
}

/// `(sin x - x cos x) / x^3`, accurate for all `x > 0`.
fn j1_over_x<T: Real>(x: T) -> T {
    if x < T::one() {
        // Σ (-1)^k (2k+2) x^{2k} / (2k+3)!
        let x2 = x * x;
        let mut term = T::one() / T::lit(3.0);
        let mut sum = term;
        for k in 1..14 {
            let kk = T::from_usize_lossy(k);
            let two = T::lit(2.0);
            // ratio between consecutive terms
            term = -term * x2 * (two * kk + two)
                / (two * kk)
                / ((two * kk + two) * (two * kk + T::lit(3.0)));
            sum += term;
        }
        sum
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// Decay correlation `D1(x) = 3/2 (sin x/x + cos x/x² − sin x/x³)`.
pub fn d1<T: Real>(x: T) -> Result<T> {
    check_domain(x)?;
    Ok(d1_unchecked(x))
}

/// `D1` extended by its limit value 1 at `x = 0`.
pub fn d1_or_limit<T: Real>(x: T) -> Result<T> {
    if x == T::zero() {
        Ok(T::one())
    } else {
        d1(x)
    }
}

fn d1_unchecked<T: Real>(x: T) -> T {
    if x < T::lit(SERIES_SWITCH) {
        let x2 = x * x;
        T::one() - x2 / T::lit(5.0) + T::lit(3.0) * x2 * x2 / T::lit(280.0)
    } else {
        T::lit(1.5) * (x.sin() / x - j1_over_x(x))
    }
}

/// Oscillatory (non-integral) part of the shift function.
fn shift_oscillatory<T: Real>(x: T) -> T {
    if x < T::lit(SERIES_SWITCH) {
        let x2 = x * x;
        let x3 = x2 * x;
        -T::lit(1.5) / x3 + T::lit(0.75) / x - T::lit(9.0 / 16.0) * x + T::lit(5.0 / 96.0) * x3
    } else {
        let (s, c) = x.sin_cos();
        T::lit(1.5) * (c / x - s / (x * x) - c / (x * x * x))
    }
}

fn shift_integrand<T: Real>(u: T, x: T) -> T {
    (-u).exp() * (T::one() + u + u * u) / (u * u + x * x)
}

/// The retarded integral `I(x) = ∫_0^∞ e^{-u}(1+u+u²)/(u²+x²) du`.
///
/// The domain is split at `u0 = max(10x, 10)`; the tail is mapped onto
/// `(0, 1]` with `u = u0 − ln t`, which cancels the exponential decay.
pub fn shift_integral<T: Real>(x: T, abs_tol: T) -> Result<T> {
    check_domain(x)?;
    let u0 = (T::lit(10.0) * x).max(T::lit(10.0));
    let half = T::lit(0.5) * abs_tol;
    let head = quadrature::integrate(
        |u| shift_integrand(u, x),
        T::zero(),
        u0,
        Tolerance {
            budget: QUADRATURE_BUDGET,
            ..Tolerance::absolute(half)
        },
    )?;
    let scale = (-u0).exp();
    let tail = if scale == T::zero() {
        T::zero()
    } else {
        quadrature::integrate(
            |t: T| {
                let u = u0 - t.ln();
                (T::one() + u + u * u) / (u * u + x * x)
            },
            T::zero(),
            T::one(),
            Tolerance {
                budget: QUADRATURE_BUDGET,
                ..Tolerance::absolute(half / scale)
            },
        )?
        .value
            * scale
    };
    Ok(head.value + tail)
}

/// Exact level-shift correlation `S(x)`; `tol` is an absolute target on the
/// returned value (floored at ~100 ulp of the integral).
pub fn s_exact<T: Real>(x: T, tol: T) -> Result<T> {
    check_domain(x)?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "quadrature tolerance must be positive, got {}",
            tol
        )));
    }
    let prefactor = T::lit(1.5) / (T::PI() * x * x);
    let integral = shift_integral(x, tol / prefactor)?;
    Ok(shift_oscillatory(x) + prefactor * integral)
}

/// Closed-form approximation of `S(x)`, with the integral replaced by
/// `(1−x²)/x · atan(1/x) + 1 + ½ ln((1+x²)/x²)`.
pub fn s_approx<T: Real>(x: T) -> Result<T> {
    check_domain(x)?;
    let x2 = x * x;
    let bracket = (T::one() - x2) / x * x.recip().atan()
        + T::one()
        + T::lit(0.5) * ((T::one() + x2) / x2).ln();
    Ok(shift_oscillatory(x) + T::lit(1.5) / (T::PI() * x2) * bracket)
}

/// Which shift function feeds the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel<T> {
    Exact { tol: T },
    Approx,
}

impl<T: Real> Kernel<T> {
    pub fn exact() -> Self {
        Kernel::Exact {
            tol: T::lit(DEFAULT_TOL),
        }
    }

    pub fn shift(&self, x: T) -> Result<T> {
        match *self {
            Kernel::Exact { tol } => s_exact(x, tol),
            Kernel::Approx => s_approx(x),
        }
    }

    /// `M(x) = S(x) + i D1(x)`.
    pub fn eval(&self, x: T) -> Result<KernelValue<T>> {
        let s = self.shift(x)?;
        let d1 = d1(x)?;
        Ok(KernelValue {
            d1,
            s,
            m: cplx(s, d1),
        })
    }

    /// Kernel evaluated at a distance given in units of λ_eg.
    pub fn at_distance(&self, distance: T) -> Result<KernelValue<T>> {
        self.eval(T::TAU() * distance)
    }
}

/// Correlation values at one separation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue<T> {
    pub d1: T,
    pub s: T,
    pub m: C<T>,
}
