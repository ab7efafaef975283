//! Numerical model of the SU(1,2) four-wave-mixer interferometer.
//!
//! The crate builds the su(1,2) algebra and its group elements ([`lie`]),
//! composes the device ([`interferometer`]), propagates Gaussian inputs
//! ([`gaussian`]), evaluates phase sensitivities of weighted photon-number
//! estimators ([`sensitivity`]), searches and sweeps detection weights and
//! gains ([`optimizer`]), and checks all of it against a truncated Fock-space
//! simulation ([`fock`]).
//!
//! `no_std` with `alloc`. Elementary functions come from `num_traits::Float`
//! backed by `libm`; when `std` is linked its inherent float methods take
//! precedence, which is why those imports carry `allow(unused_imports)`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod fock;
pub mod gaussian;
pub mod interferometer;
pub mod lie;
pub mod matrix;
pub mod optimizer;
pub mod sensitivity;

pub use gaussian::{BogoliubovTransform, OutputMoments, PhotonStatistics};
pub use interferometer::{FwmParams, InputState, InterferometerConfig, ModePair, PhaseShifts};
pub use lie::{GeneratorIndex, ModeMatrix};
pub use matrix::C64;
pub use sensitivity::{DetectorWeights, SensitivityError, SensitivityReport};
