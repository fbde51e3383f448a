//! Collective single-excitation modes of two-level atoms on a ring.
//!
//! `N` identical atoms sit on a circle of radius `r` (lengths in units of
//! the transition wavelength), optionally with one more atom at the centre.
//! The crate builds the dipole correlation kernels, diagonalizes the
//! resulting channel matrix analytically by its cyclic symmetry, checks it
//! against a dense numerical eigensolver, and derives quantum beats and
//! photon-trapping laws from the spectrum.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod correlation;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod spectrum;
pub mod trapping;

pub use correlation::Kernel;
pub use error::{Error, Result};
pub use geometry::RingConfig;
pub use scalar::{Real, C};
pub use spectrum::{Mode, ModeLabel, ModeSpectrum};

pub type Complex64 = C<f64>;
pub type Config = RingConfig<f64>;
pub type KernelF64 = Kernel<f64>;
pub type Spectrum = ModeSpectrum<f64>;
pub type ModeF64 = Mode<f64>;
pub type Channel = oracle::ChannelMatrix<f64>;
pub type Trajectory = dynamics::AmplitudeTrajectory<f64>;
pub type Beat = dynamics::BeatCurve<f64>;
pub type Scan = trapping::TrapScan<f64>;
