use crate::correlation::Kernel;
use crate::error::{Error, Result};
use crate::geometry::RingConfig;
use crate::scalar::{Real, C};

use super::tracking::{p0_quantities, Tracker, ANCHOR_LIMIT};
use super::{ring_modes, Mode, ModeLabel, ModeSpectrum, RingKernel};

/// Radius from which labels are continued when the target radius lies
/// beyond the anchor region.
pub const ANCHOR_RADIUS: f64 = 0.05;

/// Grid spacing (λ units) of the labelling continuation.
pub const LABEL_STEP: f64 = 0.01;

/// `|1 + c²|` below this flags the `p = 0` block as near-defective.
pub const NEAR_DEFECTIVE: f64 = 1e-8;

/// Diagonalization data of the two-dimensional `p = 0` carrier space
/// spanned by `|C_0>` (uniform ring) and `|C_z>` (central atom).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct P0Block<T> {
    pub ring_sum: C<T>,
    pub center: C<T>,
    /// Principal `√((ΣM)² + 4N M(k r)²)`.
    pub sqrt_disc: C<T>,
    /// Mixing parameter `c = 2√N M(k r) / (ΣM + √D)`.
    pub c: C<T>,
    /// `θ̂ = atan(c)`, principal branch.
    pub theta: C<T>,
    pub cos_theta: C<T>,
    pub sin_theta: C<T>,
    /// True when `0+` is the root `i + ½ΣM + ½√D` with eigenvector
    /// `cos θ̂ |C_0> + sin θ̂ |C_z>`; false when the labels are swapped.
    pub plus_is_principal: bool,
    /// Number of level crossings between the anchor and this radius.
    pub crossings_below: usize,
    pub near_defective: bool,
}

impl<T: Real> P0Block<T> {
    /// `|sin θ̂ cos θ̂|²`, the quantum-beat prefactor.
    pub fn beat_prefactor(&self) -> T {
        (self.sin_theta * self.cos_theta).norm_sqr()
    }
}

fn mixing_parameter<T: Real>(n: T, ring_sum: C<T>, center: C<T>, sqrt_disc: C<T>) -> C<T> {
    let den_a = ring_sum + sqrt_disc;
    let den_b = center * (T::lit(2.0) * n.sqrt());
    let zero = C::new(T::zero(), T::zero());
    if den_a.norm() >= den_b.norm() {
        if den_a.norm() == T::zero() {
            zero
        } else {
            den_b / den_a
        }
    } else {
        (sqrt_disc - ring_sum) / den_b
    }
}

/// Spectrum of configuration (a), the ring with a central atom.
///
/// Modes `p = 1..N-1` coincide with the bare ring and leave the center
/// empty. The `p = 0` space is diagonalized in closed form; its labels are
/// fixed by continuation from the small-radius anchor, so the result at
/// radius `r` costs `O(r / LABEL_STEP)` kernel sweeps beyond `r > 0.1 λ`.
pub fn eigen_center<T: Real>(
    config: &RingConfig<T>,
    kernel: &Kernel<T>,
) -> Result<ModeSpectrum<T>> {
    if !config.has_center() {
        return Err(Error::InvalidConfig(
            "eigen_center expects a configuration with central atom".into(),
        ));
    }
    let n = config.n_outer();
    let r = config.radius();
    let rk = RingKernel::new(config, kernel)?;

    let (q, root, crossings_below) = if r <= T::lit(ANCHOR_LIMIT) {
        let q = p0_quantities(n, r, kernel)?;
        if !(q.sqrt_disc.re > T::zero()) {
            return Err(Error::TrackingAmbiguity {
                radius: r.to_f64_lossy(),
            });
        }
        (q, q.sqrt_disc, 0)
    } else {
        let mut tracker = Tracker::anchor(n, T::lit(ANCHOR_RADIUS), kernel)?;
        let step = T::lit(LABEL_STEP);
        while r - tracker.radius() > step {
            let next = tracker.radius() + step;
            tracker.advance(next)?;
        }
        tracker.advance(r)?;
        (
            *tracker.quantities(),
            tracker.root(),
            tracker.crossings.len(),
        )
    };

    let nf = T::from_usize_lossy(n);
    let c = mixing_parameter(nf, q.ring_sum, q.center, q.sqrt_disc);
    let theta = c.atan();
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let near_defective = (C::new(T::one(), T::zero()) + c * c).norm() < T::lit(NEAR_DEFECTIVE);

    let inv_sqrt = nf.sqrt().recip();
    let block_vector = |outer: C<T>, centre: C<T>| {
        let mut v = vec![outer * inv_sqrt; n];
        v.push(centre);
        v
    };
    let base = q.base();
    let half = q.sqrt_disc * T::lit(0.5);
    let mu_principal = base + half;
    let mu_other = base - half;
    let v_principal = block_vector(cos_t, sin_t);
    let v_other = block_vector(-sin_t, cos_t);

    let plus_is_principal = root != q.sqrt_disc;
    let (plus, minus) = if plus_is_principal {
        ((mu_principal, v_principal), (mu_other, v_other))
    } else {
        ((mu_other, v_other), (mu_principal, v_principal))
    };

    let mut modes = Vec::with_capacity(n + 1);
    modes.push(Mode::new(
        ModeLabel::ZeroPlus,
        plus.0,
        plus.1.clone(),
        plus.1,
    ));
    modes.push(Mode::new(
        ModeLabel::ZeroMinus,
        minus.0,
        minus.1.clone(),
        minus.1,
    ));
    modes.extend(ring_modes(config, &rk, true));

    let p0 = P0Block {
        ring_sum: q.ring_sum,
        center: q.center,
        sqrt_disc: q.sqrt_disc,
        c,
        theta,
        cos_theta: cos_t,
        sin_theta: sin_t,
        plus_is_principal,
        crossings_below,
        near_defective,
    };
    Ok(ModeSpectrum {
        config: *config,
        modes,
        p0: Some(p0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::bilinear;
    use crate::spectrum::eigen_ring;

    #[test]
    fn outer_modes_ignore_the_center() {
        for &r in &[0.05, 0.3, 1.7] {
            let a = eigen_center(&RingConfig::centered(7, r).unwrap(), &Kernel::Approx).unwrap();
            let b = eigen_ring(&RingConfig::ring(7, r).unwrap(), &Kernel::Approx).unwrap();
            for p in 1..7 {
                let ma = a.mode(ModeLabel::P(p)).unwrap();
                let mb = b.mode(ModeLabel::P(p)).unwrap();
                assert_eq!(ma.mu, mb.mu);
                assert_eq!(ma.right[7], C::new(0.0, 0.0));
                assert_eq!(&ma.right[..7], &mb.right[..]);
            }
        }
    }

    #[test]
    fn p0_trace_identity() {
        let sp = eigen_center(&RingConfig::centered(9, 1.4).unwrap(), &Kernel::Approx).unwrap();
        let p0 = sp.p0.unwrap();
        let sum =
            sp.mode(ModeLabel::ZeroPlus).unwrap().mu + sp.mode(ModeLabel::ZeroMinus).unwrap().mu;
        assert!((sum - (C::new(0.0, 2.0) + p0.ring_sum)).norm() < 1e-13);
    }

    #[test]
    fn p0_vectors_are_bilinear_orthonormal() {
        let sp = eigen_center(&RingConfig::centered(5, 0.6).unwrap(), &Kernel::Approx).unwrap();
        let p = sp.mode(ModeLabel::ZeroPlus).unwrap();
        let m = sp.mode(ModeLabel::ZeroMinus).unwrap();
        assert!((bilinear(&p.left, &p.right) - C::new(1.0, 0.0)).norm() < 1e-13);
        assert!(bilinear(&p.left, &m.right).norm() < 1e-13);
        let p0 = sp.p0.unwrap();
        assert!(
            (p0.cos_theta * p0.cos_theta + p0.sin_theta * p0.sin_theta - C::new(1.0, 0.0)).norm()
                < 1e-13
        );
    }

    #[test]
    fn zero_plus_parallel_at_small_radius() {
        let sp = eigen_center(&RingConfig::centered(10, 0.02).unwrap(), &Kernel::Approx).unwrap();
        let p = sp.mode(ModeLabel::ZeroPlus).unwrap();
        let m = sp.mode(ModeLabel::ZeroMinus).unwrap();
        assert!(p.shift > 0.0 && m.shift < 0.0);
        // dipoles of 0+ all point the same way; 0- has the center opposed
        assert!((p.right[0] * p.right[10].conj()).re > 0.0);
        assert!((m.right[0] * m.right[10].conj()).re < 0.0);
    }

    #[test]
    fn requires_center() {
        let cfg = RingConfig::ring(4, 1.0).unwrap();
        assert!(matches!(
            eigen_center(&cfg, &Kernel::Approx),
            Err(Error::InvalidConfig(_))
        ));
    }
}
