//! Continuation of the two `p = 0` eigenvalues of the centered ring
//! through level crossings.
//!
//! The eigenvalues are `μ = base ∓ s/2` with `base = i + ½ΣM` and `s² = D`,
//! `D = (ΣM)² + 4N M(k r)²`. The principal square root jumps sign whenever
//! `D` crosses the negative real axis, which is exactly where the level
//! shifts cross, so the labels are carried by a continuously tracked `s`
//! instead. `0+` is anchored at small radius as the branch whose shift
//! diverges to `+∞`, i.e. `s = +√D` there.

use crate::correlation::Kernel;
use crate::error::{Error, Result};
use crate::geometry::RingConfig;
use crate::scalar::{imag_unit, Real, C};

use super::RingKernel;

/// Largest radius (λ units) accepted as the anchor of a track.
pub const ANCHOR_LIMIT: f64 = 0.1;

/// Bisection stops once a crossing is bracketed this tightly (λ units).
pub const CROSSING_RESOLUTION: f64 = 1e-12;

/// Continuation steps are internally refined to at most this size.
const MAX_STEP: f64 = 0.01;

/// A continuation step is accepted only if the better assignment costs at
/// most this fraction of the worse one.
const AMBIGUITY_RATIO: f64 = 0.5;

const MAX_DEPTH: usize = 40;

/// The `p = 0` block of the centered ring at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct P0Quantities<T> {
    pub radius: T,
    /// `Σ_{A=2}^N M(k R_1A)`.
    pub ring_sum: C<T>,
    /// `M(k r)`, the ring-center coupling.
    pub center: C<T>,
    /// Principal square root of `(ΣM)² + 4N M(k r)²`.
    pub sqrt_disc: C<T>,
}

impl<T: Real> P0Quantities<T> {
    pub fn base(&self) -> C<T> {
        imag_unit::<T>() + self.ring_sum * T::lit(0.5)
    }

    /// `(μ_{0+}, μ_{0-})` for a given signed root `s`.
    pub fn roots(&self, s: C<T>) -> (C<T>, C<T>) {
        let half = s * T::lit(0.5);
        (self.base() - half, self.base() + half)
    }
}

pub fn p0_quantities<T: Real>(
    n_outer: usize,
    radius: T,
    kernel: &Kernel<T>,
) -> Result<P0Quantities<T>> {
    let config = RingConfig::centered(n_outer, radius)?;
    let rk = RingKernel::new(&config, kernel)?;
    let ring_sum = rk.ring_sum();
    let center = rk.center().expect("centered configuration").m;
    let n = T::from_usize_lossy(n_outer);
    let disc = ring_sum * ring_sum + center * center * (T::lit(4.0) * n);
    Ok(P0Quantities {
        radius,
        ring_sum,
        center,
        sqrt_disc: disc.sqrt(),
    })
}

/// Tracked `0±` eigenvalue curves over a radius grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTrack<T> {
    pub n_outer: usize,
    pub radii: Vec<T>,
    pub plus: Vec<C<T>>,
    pub minus: Vec<C<T>>,
    /// Radii where `Re(μ_{0+} − μ_{0−})` changes sign, ascending.
    pub crossings: Vec<T>,
}

impl<T: Real> BranchTrack<T> {
    pub fn shifts(&self) -> Vec<(T, T)> {
        let h = T::lit(-0.5);
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| (p.re * h, m.re * h))
            .collect()
    }

    pub fn rates(&self) -> Vec<(T, T)> {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| (p.im, m.im))
            .collect()
    }
}

pub(crate) struct Tracker<'k, T> {
    n_outer: usize,
    kernel: &'k Kernel<T>,
    radius: T,
    quantities: P0Quantities<T>,
    /// Signed root carried along the continuation.
    root: C<T>,
    pub(crate) crossings: Vec<T>,
}

impl<'k, T: Real> Tracker<'k, T> {
    pub(crate) fn anchor(n_outer: usize, radius: T, kernel: &'k Kernel<T>) -> Result<Self> {
        if radius > T::lit(ANCHOR_LIMIT) {
            return Err(Error::InvalidArgument(format!(
                "branch tracking must start at r <= {ANCHOR_LIMIT} λ, got {radius}"
            )));
        }
        let q = p0_quantities(n_outer, radius, kernel)?;
        if !(q.sqrt_disc.re > T::zero()) {
            return Err(Error::TrackingAmbiguity {
                radius: radius.to_f64_lossy(),
            });
        }
        Ok(Self {
            n_outer,
            kernel,
            radius,
            quantities: q,
            root: q.sqrt_disc,
            crossings: Vec::new(),
        })
    }

    pub(crate) fn radius(&self) -> T {
        self.radius
    }

    pub(crate) fn quantities(&self) -> &P0Quantities<T> {
        &self.quantities
    }

    pub(crate) fn root(&self) -> C<T> {
        self.root
    }

    pub(crate) fn roots(&self) -> (C<T>, C<T>) {
        self.quantities.roots(self.root)
    }

    /// Pick the sign of `q.sqrt_disc` whose eigenvalue pair lies nearest to
    /// the pair `(plus, minus)`; `None` when neither is clearly nearer.
    fn continue_from(plus: C<T>, minus: C<T>, q: &P0Quantities<T>) -> Option<C<T>> {
        let cost = |s: C<T>| {
            let (p, m) = q.roots(s);
            (p - plus).norm() + (m - minus).norm()
        };
        let a = cost(q.sqrt_disc);
        let b = cost(-q.sqrt_disc);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !(hi > T::zero()) || lo > T::lit(AMBIGUITY_RATIO) * hi {
            return None;
        }
        Some(if a <= b { q.sqrt_disc } else { -q.sqrt_disc })
    }

    pub(crate) fn advance(&mut self, target: T) -> Result<()> {
        if target < self.radius {
            return Err(Error::InvalidArgument(
                "radius grid must be ascending".into(),
            ));
        }
        let max_step = T::lit(MAX_STEP);
        while target - self.radius > max_step {
            let next = self.radius + max_step;
            self.step(next, 0)?;
        }
        if target > self.radius {
            self.step(target, 0)?;
        }
        Ok(())
    }

    fn step(&mut self, next: T, depth: usize) -> Result<()> {
        let q = p0_quantities(self.n_outer, next, self.kernel)?;
        let (plus, minus) = self.roots();
        match Self::continue_from(plus, minus, &q) {
            Some(root) => {
                if crosses(self.root, root) {
                    let at = self.bisect(self.radius, self.root, next)?;
                    self.crossings.push(at);
                }
                self.radius = next;
                self.quantities = q;
                self.root = root;
                Ok(())
            }
            None if depth < MAX_DEPTH => {
                let mid = T::lit(0.5) * (self.radius + next);
                if mid <= self.radius || mid >= next {
                    return Err(Error::TrackingAmbiguity {
                        radius: next.to_f64_lossy(),
                    });
                }
                self.step(mid, depth + 1)?;
                self.step(next, depth + 1)
            }
            None => Err(Error::TrackingAmbiguity {
                radius: next.to_f64_lossy(),
            }),
        }
    }

    /// Refine the sign change of `Re s` inside `(lo, hi)`.
    fn bisect(&self, mut lo: T, mut root_lo: C<T>, mut hi: T) -> Result<T> {
        let resolution = T::lit(CROSSING_RESOLUTION);
        for _ in 0..200 {
            if hi - lo <= resolution {
                break;
            }
            let mid = T::lit(0.5) * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let q = p0_quantities(self.n_outer, mid, self.kernel)?;
            let s = q.sqrt_disc;
            let root_mid = if (s - root_lo).norm() <= (s + root_lo).norm() {
                s
            } else {
                -s
            };
            if crosses(root_lo, root_mid) {
                hi = mid;
            } else {
                lo = mid;
                root_lo = root_mid;
            }
        }
        Ok(T::lit(0.5) * (lo + hi))
    }
}

fn crosses<T: Real>(a: C<T>, b: C<T>) -> bool {
    (a.re > T::zero() && b.re <= T::zero()) || (a.re < T::zero() && b.re >= T::zero())
}

/// Follow `μ_{0±}` across `r_grid` (ascending, first point at most 0.1 λ)
/// and locate the level crossings.
pub fn track_p0_branches<T: Real>(
    n_outer: usize,
    r_grid: &[T],
    kernel: &Kernel<T>,
) -> Result<BranchTrack<T>> {
    let (&first, rest) = r_grid
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty radius grid".into()))?;
    let mut tracker = Tracker::anchor(n_outer, first, kernel)?;
    let mut track = BranchTrack {
        n_outer,
        radii: vec![first],
        plus: vec![tracker.roots().0],
        minus: vec![tracker.roots().1],
        crossings: Vec::new(),
    };
    for &r in rest {
        if !(r > tracker.radius()) {
            return Err(Error::InvalidArgument(
                "radius grid must be strictly ascending".into(),
            ));
        }
        tracker.advance(r)?;
        let (p, m) = tracker.roots();
        track.radii.push(r);
        track.plus.push(p);
        track.minus.push(m);
    }
    track.crossings = tracker.crossings;
    Ok(track)
}

/// Like [`track_p0_branches`] but accepts grids starting anywhere: when the
/// first radius lies beyond the anchor region the continuation starts at
/// the anchor radius and only grid points and crossings inside the grid are
/// reported.
pub fn track_p0_from_anchor<T: Real>(
    n_outer: usize,
    r_grid: &[T],
    kernel: &Kernel<T>,
) -> Result<BranchTrack<T>> {
    let Some(&first) = r_grid.first() else {
        return Err(Error::InvalidArgument("empty radius grid".into()));
    };
    if first <= T::lit(ANCHOR_LIMIT) {
        return track_p0_branches(n_outer, r_grid, kernel);
    }
    let mut grid = Vec::with_capacity(r_grid.len() + 1);
    grid.push(T::lit(super::ANCHOR_RADIUS));
    grid.extend_from_slice(r_grid);
    let mut track = track_p0_branches(n_outer, &grid, kernel)?;
    track.radii.remove(0);
    track.plus.remove(0);
    track.minus.remove(0);
    track.crossings.retain(|&c| c >= first);
    Ok(track)
}
