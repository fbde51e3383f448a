//! Analytic diagonalization of the channel matrix `R` on the Z_N carrier
//! spaces.
//!
//! Conventions (all dimensionless):
//! * `mu` is an eigenvalue of `R`, whose diagonal is `i` and whose
//!   off-diagonal entries are `M(k R_AB) = S + i D1`.
//! * `shift = Δ̃/Γ = -Re(mu)/2` and `rate = Γ_p/Γ = Im(mu)`.
//! * Right vectors are stored as site coefficients; left vectors are row
//!   vectors normalized so that `left_p · right_q = δ_pq` without complex
//!   conjugation.

mod center;
mod degeneracy;
mod tracking;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use center::{eigen_center, P0Block, ANCHOR_RADIUS, LABEL_STEP};
pub use degeneracy::{
    degeneracy_classes, sine_sum_check, AccidentalDegeneracy, Degeneracy, DEGENERACY_TOL,
};
pub use tracking::{
    p0_quantities, track_p0_branches, track_p0_from_anchor, BranchTrack, P0Quantities,
    CROSSING_RESOLUTION,
};

use crate::correlation::{Kernel, KernelValue};
use crate::error::{Error, Result};
use crate::geometry::RingConfig;
use crate::scalar::{cplx, imag_unit, Real, C};

/// Z_N quantum number of a mode. With a central atom the `p = 0` space
/// is two-dimensional and splits into `0+` and `0-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeLabel {
    ZeroPlus,
    ZeroMinus,
    P(usize),
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::ZeroPlus => f.write_str("0+"),
            ModeLabel::ZeroMinus => f.write_str("0-"),
            ModeLabel::P(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mode<T> {
    pub label: ModeLabel,
    pub mu: C<T>,
    pub shift: T,
    pub rate: T,
    pub right: Vec<C<T>>,
    pub left: Vec<C<T>>,
}

impl<T: Real> Mode<T> {
    pub fn new(label: ModeLabel, mu: C<T>, right: Vec<C<T>>, left: Vec<C<T>>) -> Self {
        Self {
            label,
            mu,
            shift: -mu.re / T::lit(2.0),
            rate: mu.im,
            right,
            left,
        }
    }

    /// Right vector rescaled to unit probability, `|C>/||C||`.
    pub fn normalized_state(&self) -> Vec<C<T>> {
        let norm = crate::scalar::norm_sqr(&self.right).sqrt();
        self.right.iter().map(|z| z / norm).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpectrum<T> {
    pub config: RingConfig<T>,
    pub modes: Vec<Mode<T>>,
    /// Present iff the configuration has a central atom.
    pub p0: Option<P0Block<T>>,
}

impl<T: Real> ModeSpectrum<T> {
    pub fn mode(&self, label: ModeLabel) -> Option<&Mode<T>> {
        self.modes.iter().find(|m| m.label == label)
    }

    pub fn eigenvalues(&self) -> Vec<C<T>> {
        self.modes.iter().map(|m| m.mu).collect()
    }

    pub fn degeneracy(&self) -> Degeneracy<T> {
        degeneracy_classes(self)
    }
}

/// Kernel values on the distinct outer-ring separations, indexed by the
/// reduced step count `m = 1..=N/2`, plus the center distance `r`.
#[derive(Clone, Debug)]
pub(crate) struct RingKernel<T> {
    n: usize,
    by_step: Vec<KernelValue<T>>,
    center: Option<KernelValue<T>>,
}

impl<T: Real> RingKernel<T> {
    pub(crate) fn new(config: &RingConfig<T>, kernel: &Kernel<T>) -> Result<Self> {
        let n = config.n_outer();
        let by_step = (1..=n / 2)
            .map(|m| kernel.at_distance(config.chord_for_steps(m)))
            .collect::<Result<Vec<_>>>()?;
        let center = if config.has_center() {
            Some(kernel.at_distance(config.radius())?)
        } else {
            None
        };
        Ok(Self { n, by_step, center })
    }

    /// Kernel value between outer atoms `steps` positions apart (`steps` not a multiple of N).
    pub(crate) fn step(&self, steps: usize) -> KernelValue<T> {
        let k = steps % self.n;
        debug_assert!(k != 0);
        self.by_step[k.min(self.n - k) - 1]
    }

    pub(crate) fn center(&self) -> Option<KernelValue<T>> {
        self.center
    }

    /// `Σ_{A=2}^N M(k R_1A)`.
    pub(crate) fn ring_sum(&self) -> C<T> {
        (1..self.n).map(|k| self.step(k).m).sum()
    }

    /// `μ_p = i + Σ_{A=2}^N M(k R_1A) cos(2π p (A-1)/N)`.
    pub(crate) fn ring_eigenvalue(&self, p: usize) -> C<T> {
        let n = self.n;
        let mut acc = imag_unit::<T>();
        for k in 1..n {
            acc += self.step(k).m * cos_fraction::<T>(p * k, n);
        }
        acc
    }
}

/// `cos(2π j / n)` evaluated on the reduced index so that `j` and `n - j`
/// give identical results.
pub(crate) fn cos_fraction<T: Real>(j: usize, n: usize) -> T {
    let k = j % n;
    let k = k.min(n - k);
    (T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(n)).cos()
}

/// `exp(2πi j / n)` on the reduced index.
pub(crate) fn phase_fraction<T: Real>(j: usize, n: usize) -> C<T> {
    let k = j % n;
    let (k, sign) = if 2 * k <= n {
        (k, T::one())
    } else {
        (n - k, -T::one())
    };
    let (s, c) = (T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(n)).sin_cos();
    cplx(c, sign * s)
}

/// Fourier carrier vector `c^p_A = exp(2πi p A/N)/√N` over `n_sites` sites
/// (a trailing central site, if any, gets amplitude 0).
pub(crate) fn fourier_vector<T: Real>(
    p: usize,
    n: usize,
    n_sites: usize,
    conjugate: bool,
) -> Vec<C<T>> {
    let inv_sqrt = T::from_usize_lossy(n).sqrt().recip();
    let mut v: Vec<C<T>> = (1..=n)
        .map(|a| {
            let z = phase_fraction::<T>(p * a, n) * inv_sqrt;
            if conjugate {
                z.conj()
            } else {
                z
            }
        })
        .collect();
    v.resize(n_sites, C::new(T::zero(), T::zero()));
    v
}

pub(crate) fn ring_modes<T: Real>(
    config: &RingConfig<T>,
    rk: &RingKernel<T>,
    skip_zero: bool,
) -> Vec<Mode<T>> {
    let n = config.n_outer();
    let sites = config.n_sites();
    let start = usize::from(skip_zero);
    (start..n)
        .map(|p| {
            Mode::new(
                ModeLabel::P(p),
                rk.ring_eigenvalue(p),
                fourier_vector(p, n, sites, false),
                fourier_vector(p, n, sites, true),
            )
        })
        .collect()
}

/// Spectrum of configuration (b), the ring without a central atom.
pub fn eigen_ring<T: Real>(config: &RingConfig<T>, kernel: &Kernel<T>) -> Result<ModeSpectrum<T>> {
    if config.has_center() {
        return Err(Error::InvalidConfig(
            "eigen_ring expects a configuration without central atom".into(),
        ));
    }
    let rk = RingKernel::new(config, kernel)?;
    Ok(ModeSpectrum {
        config: *config,
        modes: ring_modes(config, &rk, false),
        p0: None,
    })
}

/// Spectrum for either configuration.
pub fn spectrum<T: Real>(config: &RingConfig<T>, kernel: &Kernel<T>) -> Result<ModeSpectrum<T>> {
    if config.has_center() {
        eigen_center(config, kernel)
    } else {
        eigen_ring(config, kernel)
    }
}
