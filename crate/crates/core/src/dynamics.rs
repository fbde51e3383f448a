//! Time evolution inside the single-excitation atomic subspace.
//!
//! Times are in units of `1/Γ`. The common phase from the renormalized
//! transition energy is dropped, so a mode `μ` evolves as
//! `exp(i μ t / 2) = exp(-(i Δ̃ + Γ_p/2) t)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::Kernel;
use crate::error::{Error, Result};
use crate::geometry::RingConfig;
use crate::scalar::{bilinear, cplx, Real, C};
use crate::spectrum::{eigen_center, ModeLabel, ModeSpectrum, P0Block};

/// Default `ω_R` threshold (units of Γ) under which the transfer is
/// classified as aperiodic.
pub const CROSSING_THRESHOLD: f64 = 1e-6;

/// Upper clip of the default time span, in units of `1/Γ`.
pub const MAX_SPAN: f64 = 1e3;

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplitudeTrajectory<T> {
    pub times: Vec<T>,
    /// `site_amplitudes[k][A]` is the amplitude on site `A` at `times[k]`.
    pub site_amplitudes: Vec<Vec<C<T>>>,
    pub survival: Vec<T>,
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < T::zero()) {
        return Err(Error::InvalidArgument(
            "times must be finite and non-negative".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be ascending".into()));
    }
    Ok(())
}

/// Evolve normalized site coefficients under the modal decomposition of
/// `spectrum`.
pub fn propagate<T: Real>(
    spectrum: &ModeSpectrum<T>,
    initial: &[C<T>],
    times: &[T],
) -> Result<AmplitudeTrajectory<T>> {
    let sites = spectrum.config.n_sites();
    if initial.len() != sites {
        return Err(Error::InvalidArgument(format!(
            "initial state has {} entries, expected {sites}",
            initial.len()
        )));
    }
    let norm: T = initial.iter().map(|z| z.norm_sqr()).sum();
    if (norm - T::one()).abs() > T::lit(NORM_TOL) {
        return Err(Error::InvalidArgument(format!(
            "initial state is not normalized (norm² = {norm})"
        )));
    }
    propagate_unchecked(spectrum, initial, times)
}

/// Like [`propagate`] but accepts any coefficient vector (used for
/// linearity checks on unnormalized combinations).
pub fn propagate_unchecked<T: Real>(
    spectrum: &ModeSpectrum<T>,
    initial: &[C<T>],
    times: &[T],
) -> Result<AmplitudeTrajectory<T>> {
    check_times(times)?;
    if let Some(p0) = &spectrum.p0 {
        if p0.near_defective {
            let n = (C::new(T::one(), T::zero()) + p0.c * p0.c).norm();
            return Err(Error::NearDefective {
                norm: n.to_f64_lossy(),
            });
        }
    }
    let weights: Vec<C<T>> = spectrum
        .modes
        .iter()
        .map(|m| bilinear(&m.left, initial))
        .collect();
    let half = T::lit(0.5);
    let site_amplitudes: Vec<Vec<C<T>>> = times
        .par_iter()
        .map(|&t| {
            let mut amp = vec![cplx(T::zero(), T::zero()); initial.len()];
            for (mode, w) in spectrum.modes.iter().zip(&weights) {
                let phase = (cplx(-mode.mu.im, mode.mu.re) * (t * half)).exp() * w;
                for (a, r) in amp.iter_mut().zip(&mode.right) {
                    *a += r * phase;
                }
            }
            amp
        })
        .collect();
    let survival = site_amplitudes
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum())
        .collect();
    Ok(AmplitudeTrajectory {
        times: times.to_vec(),
        site_amplitudes,
        survival,
    })
}

/// Quantum-beat transfer probability from the centre atom to the uniform
/// ring state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeatCurve<T> {
    pub times: Vec<T>,
    pub probability: Vec<T>,
    /// `probability / |sin θ̂ cos θ̂|²`.
    pub normalized: Vec<T>,
    pub prefactor: T,
}

fn p0_of<T: Real>(n: usize, r: T, kernel: &Kernel<T>) -> Result<(ModeSpectrum<T>, P0Block<T>)> {
    let spec = eigen_center(&RingConfig::centered(n, r)?, kernel)?;
    let p0 = spec
        .p0
        .expect("centred configuration carries a p = 0 block");
    Ok((spec, p0))
}

fn plus_minus<T: Real>(spec: &ModeSpectrum<T>) -> ((T, T), (T, T)) {
    let plus = spec.mode(ModeLabel::ZeroPlus).expect("0+ mode");
    let minus = spec.mode(ModeLabel::ZeroMinus).expect("0- mode");
    ((plus.shift, plus.rate), (minus.shift, minus.rate))
}

pub fn beat_probability<T: Real>(
    n: usize,
    r: T,
    kernel: &Kernel<T>,
    times: &[T],
) -> Result<BeatCurve<T>> {
    check_times(times)?;
    let (spec, p0) = p0_of(n, r, kernel)?;
    Ok(beat_curve(&spec, &p0, times))
}

fn beat_curve<T: Real>(spec: &ModeSpectrum<T>, p0: &P0Block<T>, times: &[T]) -> BeatCurve<T> {
    let ((d_plus, g_plus), (d_minus, g_minus)) = plus_minus(spec);
    let prefactor = p0.beat_prefactor();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let normalized: Vec<T> = times
        .iter()
        .map(|&t| {
            (-g_plus * t).exp() + (-g_minus * t).exp()
                - two * (-(g_plus + g_minus) * half * t).exp() * ((d_plus - d_minus) * t).cos()
        })
        .collect();
    let probability = normalized.iter().map(|&v| v * prefactor).collect();
    BeatCurve {
        times: times.to_vec(),
        probability,
        normalized,
        prefactor,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BeatResult<T> {
    /// `½ Re √((ΣM)² + 4N M(k r)²)`, units of Γ.
    pub omega_r: T,
    /// `|Δ̃_{0+} - Δ̃_{0-}|`, units of Γ.
    pub omega_shift_difference: T,
    /// `(Γ_{0+}/Γ, Γ_{0-}/Γ)`.
    pub rates: (T, T),
    pub prefactor: T,
    pub crossing: bool,
}

pub fn beat_frequency<T: Real>(n: usize, r: T, kernel: &Kernel<T>) -> Result<BeatResult<T>> {
    beat_frequency_with(n, r, kernel, T::lit(CROSSING_THRESHOLD))
}

pub fn beat_frequency_with<T: Real>(
    n: usize,
    r: T,
    kernel: &Kernel<T>,
    threshold: T,
) -> Result<BeatResult<T>> {
    let (spec, p0) = p0_of(n, r, kernel)?;
    let ((d_plus, g_plus), (d_minus, g_minus)) = plus_minus(&spec);
    let omega_r = p0.sqrt_disc.re * T::lit(0.5);
    Ok(BeatResult {
        omega_r,
        omega_shift_difference: (d_plus - d_minus).abs(),
        rates: (g_plus, g_minus),
        prefactor: p0.beat_prefactor(),
        crossing: omega_r < threshold,
    })
}

/// `min(10 / min(Γ_{0+}, Γ_{0-}), MAX_SPAN)`.
pub fn default_span<T: Real>(rates: (T, T)) -> T {
    let slowest = rates.0.min(rates.1);
    let span = if slowest > T::zero() {
        T::lit(10.0) / slowest
    } else {
        T::infinity()
    };
    span.min(T::lit(MAX_SPAN))
}

/// `count` equally spaced times covering `[0, span]`.
pub fn time_grid<T: Real>(span: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![T::zero()],
        _ => {
            let step = span / T::from_usize_lossy(count - 1);
            (0..count).map(|k| step * T::from_usize_lossy(k)).collect()
        }
    }
}

/// Uniform ring state `|C_0>` over `n_sites` sites.
pub fn uniform_ring_state<T: Real>(n_outer: usize, n_sites: usize) -> Vec<C<T>> {
    let a = T::from_usize_lossy(n_outer).sqrt().recip();
    let mut v = vec![cplx(a, T::zero()); n_outer];
    v.resize(n_sites, cplx(T::zero(), T::zero()));
    v
}

/// Excitation on the central atom alone, `|C_z>`.
pub fn center_state<T: Real>(n_outer: usize) -> Vec<C<T>> {
    let mut v = vec![cplx(T::zero(), T::zero()); n_outer + 1];
    v[n_outer] = cplx(T::one(), T::zero());
    v
}
