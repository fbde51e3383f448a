//! Photon trapping in the bare ring: the most subradiant mode as a function
//! of the atom number and the exponential suppression law fitted to it.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::{d1, Kernel};
use crate::error::{Error, Result};
use crate::geometry::{nn_distance, RingConfig};
use crate::scalar::{Real, C};
use crate::spectrum::{spectrum, ModeLabel};

/// Exact nearest-neighbour chord (λ units) at or below which a ring counts
/// as supercritical.
pub const SUPERCRITICAL_NN: f64 = 0.45;

/// Largest ring a scan accepts by default.
pub const N_MAX: usize = 200;

/// Rates below this are clamped and flagged.
pub const UNDERFLOW: f64 = 1e-300;

/// Relative accuracy a minimal rate must retain to enter the fit.
pub const REQUIRED_RELATIVE_ACCURACY: f64 = 1e-6;

/// Minimum number of usable supercritical points for a fit.
pub const MIN_FIT_POINTS: usize = 5;

/// Largest single-step drop of `-ln γ_min` tolerated as a parity effect.
pub const MONOTONE_SLACK: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinRate<T> {
    pub gamma_min: T,
    pub label: ModeLabel,
    /// `|C_min> / ||C_min||`.
    pub state: Vec<C<T>>,
    pub underflow: bool,
    /// Rounding bound on `gamma_min` (floating-point summation of the
    /// decay row) divided by [`REQUIRED_RELATIVE_ACCURACY`].
    pub precision_floor: T,
    pub precision_limited: bool,
}

/// Floating-point noise level of a computed rate: `n · ε · (1 + Σ_B |D1|)`.
fn rounding_bound<T: Real>(config: &RingConfig<T>) -> Result<T> {
    let n = config.n_outer();
    let tau = T::TAU();
    let mut row = T::one();
    for k in 1..n {
        row += d1(tau * config.chord_for_steps(k))?.abs();
    }
    if config.has_center() {
        row += d1(tau * config.radius())?.abs();
    }
    Ok(T::from_usize_lossy(config.n_sites()) * T::epsilon() * row)
}

/// Mode with the smallest decay rate.
pub fn min_rate<T: Real>(config: &RingConfig<T>, kernel: &Kernel<T>) -> Result<MinRate<T>> {
    let spec = spectrum(config, kernel)?;
    let mode = spec
        .modes
        .iter()
        .min_by(|a, b| {
            a.rate
                .partial_cmp(&b.rate)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("spectrum has at least two modes");
    let floor = rounding_bound(config)? / T::lit(REQUIRED_RELATIVE_ACCURACY);
    let underflow = !(mode.rate >= T::lit(UNDERFLOW));
    Ok(MinRate {
        gamma_min: if underflow {
            T::lit(UNDERFLOW)
        } else {
            mode.rate
        },
        label: mode.label,
        state: mode.normalized_state(),
        underflow,
        precision_floor: floor,
        precision_limited: mode.rate < floor,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrapEntry<T> {
    pub n: usize,
    pub gamma_min: T,
    pub p_min: ModeLabel,
    pub nn_exact: T,
    pub nn_approx: T,
    pub neg_log_gamma_min: T,
    pub underflow: bool,
    pub precision_limited: bool,
    pub supercritical: bool,
}

impl<T: Real> TrapEntry<T> {
    pub fn usable(&self) -> bool {
        !self.underflow && !self.precision_limited
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrapFit<T> {
    /// `s(r)`: slope of `-ln γ_min` against `N`.
    pub slope: T,
    pub intercept: T,
    /// Knee: where the line reaches the pre-critical plateau.
    pub n_hat: T,
    /// Median `-ln γ_min` over pre-critical rings.
    pub plateau: T,
    pub residual_rms: T,
    /// Spread of the fitted line over the fitted points.
    pub fitted_range: T,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrapScan<T> {
    pub radius: T,
    pub entries: Vec<TrapEntry<T>>,
    pub fit: TrapFit<T>,
    /// Supercritical steps where `-ln γ_min` decreases: `(N, relative drop)`.
    pub monotone_violations: Vec<(usize, T)>,
}

impl<T: Real> TrapScan<T> {
    /// True when every decrease is a single step below [`MONOTONE_SLACK`].
    pub fn monotone_within_slack(&self) -> bool {
        self.monotone_violations
            .iter()
            .all(|(_, d)| *d < T::lit(MONOTONE_SLACK))
    }

    pub fn critical_nn(&self) -> T {
        T::TAU() * self.radius / self.fit.n_hat
    }

    /// Compare `1/γ_min` with `exp(s (N - N̂))` over the fitted points.
    pub fn lifetime_law(&self) -> LifetimeLaw<T> {
        let fit = &self.fit;
        let max_deviation = self
            .fitted()
            .map(|e| {
                (e.neg_log_gamma_min - fit.slope * (T::from_usize_lossy(e.n) - fit.n_hat)).abs()
            })
            .fold(T::zero(), T::max);
        let allowed = fit.plateau.abs() + T::lit(3.0) * fit.residual_rms;
        LifetimeLaw {
            max_deviation,
            allowed,
            consistent: max_deviation <= allowed,
        }
    }

    fn fitted(&self) -> impl Iterator<Item = &TrapEntry<T>> {
        self.entries
            .iter()
            .filter(|e| e.supercritical && e.usable())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LifetimeLaw<T> {
    /// Largest `|ln(τ_min/τ) - s (N - N̂)|` over fitted points.
    pub max_deviation: T,
    /// Plateau offset plus three residual standard deviations.
    pub allowed: T,
    pub consistent: bool,
}

fn median<T: Real>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / T::lit(2.0)
    }
}

fn least_squares<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxy: T = xs.iter().zip(ys).map(|(x, y)| (*x - mx) * (*y - my)).sum();
    let sxx: T = xs.iter().map(|x| (*x - mx) * (*x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn entry<T: Real>(radius: T, n: usize, kernel: &Kernel<T>) -> Result<TrapEntry<T>> {
    let config = RingConfig::ring(n, radius)?;
    let m = min_rate(&config, kernel)?;
    let nn = nn_distance(&config);
    Ok(TrapEntry {
        n,
        gamma_min: m.gamma_min,
        p_min: m.label,
        nn_exact: nn.exact,
        nn_approx: nn.approx,
        neg_log_gamma_min: -m.gamma_min.max(T::lit(UNDERFLOW)).ln(),
        underflow: m.underflow,
        precision_limited: m.precision_limited,
        supercritical: nn.exact <= T::lit(SUPERCRITICAL_NN),
    })
}

/// Tabulate `γ_min(N)` for the bare ring at fixed radius and fit the
/// supercritical suppression law.
pub fn scan<T: Real>(radius: T, n_range: &[usize], kernel: &Kernel<T>) -> Result<TrapScan<T>> {
    scan_with_cap(radius, n_range, kernel, N_MAX)
}

pub fn scan_with_cap<T: Real>(
    radius: T,
    n_range: &[usize],
    kernel: &Kernel<T>,
    n_max: usize,
) -> Result<TrapScan<T>> {
    if n_range.is_empty() || n_range.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "N range must be non-empty and strictly ascending".into(),
        ));
    }
    if let Some(&last) = n_range.last() {
        if last > n_max {
            return Err(Error::InvalidArgument(format!(
                "N = {last} exceeds the scan cap {n_max}"
            )));
        }
    }
    let entries = n_range
        .par_iter()
        .map(|&n| entry(radius, n, kernel))
        .collect::<Result<Vec<_>>>()?;

    let (xs, ys): (Vec<T>, Vec<T>) = entries
        .iter()
        .filter(|e| e.supercritical && e.usable())
        .map(|e| (T::from_usize_lossy(e.n), e.neg_log_gamma_min))
        .unzip();
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            what: "supercritical",
            found: xs.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    let pre: Vec<T> = entries
        .iter()
        .filter(|e| !e.supercritical)
        .map(|e| e.neg_log_gamma_min)
        .collect();
    if pre.is_empty() {
        return Err(Error::InsufficientPoints {
            what: "pre-critical",
            found: 0,
            needed: 1,
        });
    }
    let (slope, intercept) = least_squares(&xs, &ys);
    let plateau = median(pre);
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let d = *y - (intercept + slope * *x);
            d * d
        })
        .sum::<T>()
        / T::from_usize_lossy(xs.len()))
    .sqrt();
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let fit = TrapFit {
        slope,
        intercept,
        n_hat: (plateau - intercept) / slope,
        plateau,
        residual_rms,
        fitted_range: (slope * (hi - lo)).abs(),
        points: xs.len(),
    };

    let usable: Vec<&TrapEntry<T>> = entries
        .iter()
        .filter(|e| e.supercritical && e.usable())
        .collect();
    let monotone_violations = usable
        .windows(2)
        .filter(|w| w[1].neg_log_gamma_min < w[0].neg_log_gamma_min)
        .map(|w| {
            (
                w[1].n,
                (w[0].neg_log_gamma_min - w[1].neg_log_gamma_min) / w[0].neg_log_gamma_min.abs(),
            )
        })
        .collect();

    Ok(TrapScan {
        radius,
        entries,
        fit,
        monotone_violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeRow<T> {
    pub radius: T,
    pub slope: T,
    pub n_hat: T,
    /// `4π r`, the closed-form critical atom number.
    pub n_hat_formula: T,
    pub critical_nn: T,
}

impl<T: Real> SlopeRow<T> {
    pub fn formula_ratio(&self) -> T {
        self.n_hat / self.n_hat_formula
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeTable<T> {
    pub rows: Vec<SlopeRow<T>>,
    pub strictly_decreasing: bool,
}

/// Run one scan over `N = 2..=n_max` per radius.
pub fn slope_vs_radius<T: Real>(
    r_grid: &[T],
    n_max: usize,
    kernel: &Kernel<T>,
) -> Result<SlopeTable<T>> {
    let ns: Vec<usize> = (2..=n_max).collect();
    let rows = r_grid
        .par_iter()
        .map(|&r| {
            let s = scan_with_cap(r, &ns, kernel, n_max.max(N_MAX))?;
            Ok(SlopeRow {
                radius: r,
                slope: s.fit.slope,
                n_hat: s.fit.n_hat,
                n_hat_formula: T::lit(2.0) * T::TAU() * r,
                critical_nn: s.critical_nn(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].slope < w[0].slope);
    Ok(SlopeTable {
        rows,
        strictly_decreasing,
    })
}
