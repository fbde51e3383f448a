//! Ring geometry: a regular N-gon of radius `r` (in units of λ_eg), with
//! or without an extra atom at the center.
//!
//! Outer atoms carry labels `A = 1..=N`; the central atom is site `z`.
//! Vectors over sites store the outer atoms at indices `0..N` and the
//! central atom (if any) at index `N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingConfig<T> {
    n_outer: usize,
    radius: T,
    has_center: bool,
}

impl<T: Real> RingConfig<T> {
    pub fn new(n_outer: usize, radius: T, has_center: bool) -> Result<Self> {
        if n_outer < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 outer atoms, got {n_outer}"
            )));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            n_outer,
            radius,
            has_center,
        })
    }

    /// Configuration (b): ring only.
    pub fn ring(n_outer: usize, radius: T) -> Result<Self> {
        Self::new(n_outer, radius, false)
    }

    /// Configuration (a): ring plus central atom.
    pub fn centered(n_outer: usize, radius: T) -> Result<Self> {
        Self::new(n_outer, radius, true)
    }

    pub fn n_outer(&self) -> usize {
        self.n_outer
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn has_center(&self) -> bool {
        self.has_center
    }

    pub fn n_sites(&self) -> usize {
        self.n_outer + usize::from(self.has_center)
    }

    pub fn with_radius(&self, radius: T) -> Result<Self> {
        Self::new(self.n_outer, radius, self.has_center)
    }

    pub fn without_center(&self) -> Self {
        Self {
            has_center: false,
            ..*self
        }
    }

    /// Distance between two outer atoms `steps` positions apart.
    ///
    /// Uses the closed-form chord on the reduced step `min(k, N-k)`, so
    /// mirrored pairs give bitwise identical distances.
    pub fn chord_for_steps(&self, steps: usize) -> T {
        let n = self.n_outer;
        let k = steps % n;
        let k = k.min(n - k);
        let angle = T::PI() * T::from_usize_lossy(k) / T::from_usize_lossy(n);
        T::lit(2.0) * self.radius * angle.sin()
    }
}

/// First-row distances `R_{1A}`; every other pair follows by rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceTable<T> {
    config: RingConfig<T>,
    chords: Vec<T>,
}

impl<T: Real> DistanceTable<T> {
    pub fn config(&self) -> &RingConfig<T> {
        &self.config
    }

    /// `R_{1A}` for `A = 2..=N`.
    pub fn chord(&self, a: usize) -> T {
        assert!(
            (2..=self.config.n_outer).contains(&a),
            "outer label {a} outside 2..={}",
            self.config.n_outer
        );
        self.chords[a - 2]
    }

    /// All of `R_{12}, ..., R_{1N}` in label order.
    pub fn chords(&self) -> &[T] {
        &self.chords
    }

    /// Distance from an outer atom to the center, present iff the
    /// configuration has a central atom.
    pub fn center_distance(&self) -> Option<T> {
        self.config.has_center.then_some(self.config.radius)
    }

    /// Distance between two distinct sites (0-based site indices).
    pub fn between(&self, i: usize, j: usize) -> T {
        let n = self.config.n_outer;
        assert!(i != j, "self-distance is never evaluated");
        assert!(i < self.config.n_sites() && j < self.config.n_sites());
        if i == n || j == n {
            self.config.radius
        } else {
            self.config.chord_for_steps(i.abs_diff(j))
        }
    }
}

pub fn build<T: Real>(config: &RingConfig<T>) -> DistanceTable<T> {
    let chords = (1..config.n_outer)
        .map(|steps| config.chord_for_steps(steps))
        .collect();
    DistanceTable {
        config: *config,
        chords,
    }
}

/// Next-neighbour distance on the perimeter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestNeighbour<T> {
    /// Exact chord `2 r sin(π/N)`.
    pub exact: T,
    /// Arc-length estimate `2πr/N`.
    pub approx: T,
}

pub fn nn_distance<T: Real>(config: &RingConfig<T>) -> NearestNeighbour<T> {
    NearestNeighbour {
        exact: config.chord_for_steps(1),
        approx: T::TAU() * config.radius / T::from_usize_lossy(config.n_outer),
    }
}
