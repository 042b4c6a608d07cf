//! Physical constants for the two supported unit systems.
//!
//! All dynamics run in internal units where `c = ħ = k_B = 1`. SI values are
//! only substituted at the boundary (configuration and reporting).

/// CODATA 2018 speed of light, m/s (exact).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
/// CODATA 2018 reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// CODATA 2018 Boltzmann constant, J/K (exact).
pub const BOLTZMANN_SI: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c: f64,
    pub hbar: f64,
    pub k_b: f64,
}

impl Constants {
    pub const INTERNAL: Constants = Constants {
        c: 1.0,
        hbar: 1.0,
        k_b: 1.0,
    };

    pub const SI: Constants = Constants {
        c: SPEED_OF_LIGHT_SI,
        hbar: HBAR_SI,
        k_b: BOLTZMANN_SI,
    };
}

impl Default for Constants {
    fn default() -> Self {
        Constants::INTERNAL
    }
}

/// Dimensionless nonlinear detuning coefficient from the nonlinear index `n1`:
/// `ζ = (ħ ω_m0 c n1)²`, so that `ζ N²` is the detuning factor with intensity
/// `I = ħ ω_m0 c N`.
pub fn zeta_from_nonlinear_index(n1: f64, omega_m0: f64, constants: &Constants) -> f64 {
    let per_photon = constants.hbar * omega_m0 * constants.c * n1;
    per_photon * per_photon
}
