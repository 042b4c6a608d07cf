//! Photon-pair creation from the vacuum of a cavity with time-varying
//! optical length.
//!
//! * [`cavity`]: length profiles, the dielectric/length equivalence and
//!   instantaneous mode frequencies.
//! * [`engine`]: Bogoliubov evolution of a single mode, phase and squeezing
//!   integrals.
//! * [`casimir`]: closed-form growth models of the parametric instability
//!   (ideal, lossy, saturated) and resonance scans.
//! * [`unruh`]: Unruh spectra and the effective acceleration matching the
//!   cavity photon number.
//!
//! Everything runs in internal units with `c = ħ = k_B = 1` unless a
//! [`units::Constants`] value says otherwise.

pub mod casimir;
pub mod cavity;
pub mod engine;
pub mod error;
pub mod numerics;
pub mod units;
pub mod unruh;

pub use error::{Error, Result};

/// Version of this crate, recorded in exported tables.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
