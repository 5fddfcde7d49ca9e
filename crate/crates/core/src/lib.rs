//! Desk-scale simulation of single-particle interference, beam-splitter
//! unitarity, Franson-type energy-time entanglement and chained Bell
//! correlations.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. File formats,
//! parameter scans and the command-line front end live in the `nonlocal`
//! companion crate.
//!
//! Module map:
//!
//! * [`spectra`]: spectral densities, coherence times and the frequency
//!   integration primitive (adaptive Gauss-Legendre, see [`quadrature`]).
//! * [`interferometer`]: the single-photon Mach-Zehnder arrangement,
//!   detection distributions and seeded event sampling.
//! * [`measurement`]: 2x2 complex beam-splitter matrices and the unitarity
//!   check that keeps one photon producing exactly one count.
//! * [`entangle`]: the two-photon, four-path interferometer and its joint
//!   outcome distributions.
//! * [`bell`]: correlation models and the chained inequality `I(N, Θ)`.
//! * [`extensions`]: statistical distance and the biased-marginal bound.

#![cfg_attr(not(feature = "std"), no_std)]
// NaN must fail every validity check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bell;
pub mod entangle;
pub mod extensions;
pub mod interferometer;
pub mod measurement;
pub mod quadrature;
pub mod spectra;

mod sum;

pub use bell::{ChainedConfig, ChainedResult, Classification, CorrelationModel};
pub use entangle::{FransonConfig, JointDistribution};
pub use interferometer::{DetectionDistribution, InterferometerConfig, Outcome};
pub use measurement::{MeasurementMatrix, PathAmplitudes};
pub use spectra::{CoherenceTime, Shape, Spectrum};
