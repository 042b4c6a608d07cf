//! Unruh spectra and the effective acceleration of a pumped cavity mode.
//!
//! The effective acceleration `a_eff` is the constant acceleration whose
//! Unruh photon number at `ω_m0` equals the normalised cavity photon number
//! `N_c = ⟨N_m⟩/V_c`. With `y = 2πω_m0 c/|a_eff|` it solves
//!
//! ```text
//! (e^y − 1) N_c = 1 + 4π²/y²
//! ```
//!
//! and, dropping the `4π²/y²` term, `y ≈ ln(1 + 1/N_c)`.

use std::f64::consts::{E, PI, TAU};

use crate::casimir::{self, DriveParams};
use crate::cavity::ModeSpec;
use crate::error::{check_finite, check_positive, Error, Result};
use crate::numerics::roots;
use crate::units::Constants;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// `T = ħ|a| / (2π c k_B)`.
pub fn unruh_temperature(a: f64, k: &Constants) -> f64 {
    k.hbar * a.abs() / (TAU * k.c * k.k_b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub a: f64,
    /// `W = [1 + a²/ω²c²] W_T`.
    pub energy: f64,
    /// Thermal energy per mode including the vacuum `ħω/2`.
    pub thermal_energy: f64,
    /// Photon number per mode, vacuum half excluded.
    pub photons: f64,
}

fn acceleration_factor(omega: f64, a: f64, c: f64) -> f64 {
    let x = a / (omega * c);
    1.0 + x * x
}

/// `W_T = (ħω/2) coth(πωc/|a|)`; `ħω/2` at `a = 0`.
pub fn thermal_energy_coth(omega: f64, a: f64, k: &Constants) -> f64 {
    let half = 0.5 * k.hbar * omega;
    if a == 0.0 {
        return half;
    }
    let x = PI * omega * k.c / a.abs();
    half / x.tanh()
}

/// `W_T = ħω [½ + 1/(e^{2πωc/|a|} − 1)]`.
pub fn thermal_energy_planck(omega: f64, a: f64, k: &Constants) -> f64 {
    k.hbar * omega * (0.5 + planck_occupation(omega, a, k.c))
}

fn planck_occupation(omega: f64, a: f64, c: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    1.0 / (TAU * omega * c / a.abs()).exp_m1()
}

/// Energy per mode seen by an observer with constant acceleration `a`.
pub fn unruh_energy_density(omega: f64, a: f64, k: &Constants) -> Result<SpectrumPoint> {
    check_positive("omega", omega)?;
    check_finite("a", a)?;
    let thermal = thermal_energy_coth(omega, a, k);
    let factor = acceleration_factor(omega, a, k.c);
    Ok(SpectrumPoint {
        omega,
        a,
        energy: factor * thermal,
        thermal_energy: thermal,
        photons: factor * planck_occupation(omega, a, k.c),
    })
}

/// `N(ω) = [1 + a²/ω²c²] / (e^{2πωc/|a|} − 1)`.
pub fn unruh_photon_number(omega: f64, a: f64, k: &Constants) -> Result<f64> {
    check_positive("omega", omega)?;
    check_finite("a", a)?;
    Ok(acceleration_factor(omega, a, k.c) * planck_occupation(omega, a, k.c))
}

/// Spectrum over a frequency grid at fixed acceleration.
pub fn unruh_spectrum(omegas: &[f64], a: f64, k: &Constants) -> Result<Vec<SpectrumPoint>> {
    omegas.iter().map(|&w| unruh_energy_density(w, a, k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveAcceleration {
    /// `N_c = ⟨N_m⟩ / V_c`.
    pub n_c: f64,
    pub y_exact: f64,
    pub y_approx: f64,
    pub a_eff_exact: f64,
    pub a_eff_approx: f64,
}

/// `ln(1 + 1/N_c)`.
pub fn y_approx(n_c: f64) -> f64 {
    (1.0 / n_c).ln_1p()
}

/// Matching-equation residual `f(y) = (e^y − 1) N_c − 1 − 4π²/y²`.
pub fn matching_residual(y: f64, n_c: f64) -> f64 {
    y.exp_m1() * n_c - 1.0 - FOUR_PI_SQ / (y * y)
}

/// Log form `g(y) = ln(e^y − 1) + ln N_c − ln(1 + 4π²/y²)` of the matching
/// equation with its derivative. `g` is strictly increasing on `y > 0` and
/// stays finite where `e^y` would overflow.
fn log_matching(y: f64, ln_nc: f64) -> (f64, f64) {
    let ln_expm1 = if y > 30.0 { y + (-(-y).exp()).ln_1p() } else { y.exp_m1().ln() };
    let q = FOUR_PI_SQ / (y * y);
    let value = ln_expm1 + ln_nc - q.ln_1p();
    // d/dy ln(e^y − 1) = 1/(1 − e^{−y}); d/dy ln(1 + q) = −2q/(y(1 + q)).
    let deriv = 1.0 / -(-y).exp_m1() + 2.0 * q / (y * (1.0 + q));
    (value, deriv)
}

/// Root of the exact matching equation.
pub fn y_exact(n_c: f64) -> Result<f64> {
    if !(n_c > 0.0) || !n_c.is_finite() {
        return Err(Error::NonPositivePhotonNumber(n_c));
    }
    let ln_nc = n_c.ln();
    let g = |y: f64| log_matching(y, ln_nc);
    let mut lo = 1e-8;
    let mut hi = 1e3;
    while g(lo).0 > 0.0 {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(Error::RootBracketFailure { lo, hi });
        }
    }
    while g(hi).0 < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::RootBracketFailure { lo, hi });
        }
    }
    roots::bisect_then_newton(g, lo, hi, 1e-15)
}

/// Effective Unruh acceleration of a cavity holding `n_m` photons in a mode
/// of frequency `omega_m0`, with normalisation `v_c`.
pub fn effective_acceleration(n_m: f64, omega_m0: f64, v_c: f64, k: &Constants) -> Result<EffectiveAcceleration> {
    check_positive("omega_m0", omega_m0)?;
    check_positive("V_c", v_c)?;
    if !(n_m > 0.0) || !n_m.is_finite() {
        return Err(Error::NonPositivePhotonNumber(n_m));
    }
    let n_c = n_m / v_c;
    let ya = y_approx(n_c);
    let ye = y_exact(n_c)?;
    let scale = TAU * omega_m0 * k.c;
    Ok(EffectiveAcceleration {
        n_c,
        y_exact: ye,
        y_approx: ya,
        a_eff_exact: scale / ye,
        a_eff_approx: scale / ya,
    })
}

/// Peak acceleration `a0 = εΩ² = 4εω_m0²` of a mirror driven at `Ω = 2ω_m0`.
pub fn mirror_peak_acceleration(epsilon: f64, mode: &ModeSpec) -> Result<f64> {
    check_finite("epsilon", epsilon)?;
    if epsilon < 0.0 {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "mirror amplitude must be non-negative".into(),
        });
    }
    let w = mode.frequency();
    Ok(4.0 * epsilon * w * w)
}

/// Same quantity written as `(2πω_m0 c)(4ε/L0) m`.
pub fn mirror_peak_acceleration_geometric(epsilon: f64, mode: &ModeSpec) -> f64 {
    TAU * mode.frequency() * mode.c() * 4.0 * epsilon / mode.base_length() * mode.m() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelerationRatio {
    /// `L0 / (4mε ln(1 + 1/N_c))`.
    pub r: f64,
    /// Same ratio with the exact root `y_exact` in place of the logarithm.
    pub r_exact: f64,
    /// `R ≥ 1`: the cavity outperforms an Unruh observer at the peak mirror
    /// acceleration.
    pub high_acceleration: bool,
}

/// `R = a_eff / a0`.
pub fn acceleration_ratio(n_m: f64, epsilon: f64, l0: f64, m: u32, v_c: f64) -> Result<AccelerationRatio> {
    check_positive("epsilon", epsilon)?;
    check_positive("L0", l0)?;
    check_positive("V_c", v_c)?;
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "mode",
            reason: "mode number must be >= 1".into(),
        });
    }
    if !(n_m > 0.0) || !n_m.is_finite() {
        return Err(Error::NonPositivePhotonNumber(n_m));
    }
    let n_c = n_m / v_c;
    let k = l0 / (4.0 * m as f64 * epsilon);
    let r = k / y_approx(n_c);
    let r_exact = k / y_exact(n_c)?;
    Ok(AccelerationRatio {
        r,
        r_exact,
        high_acceleration: r >= 1.0,
    })
}

/// Time at which the cavity reaches `R(t) = 1` under lossless resonant
/// growth, together with the closed-form comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdTime {
    pub nu0: f64,
    /// Root of `R(t) − 1` with `N_c = sinh²(ν0 t)/V_c`.
    pub t_star: f64,
    /// `asinh(√(V_c/(e^K − 1)))/ν0` with `K = L0/(4mε)`.
    pub t_closed_form: f64,
    /// Inversion using `⟨N⟩ ≈ ¼e^{2ν0t}`: `ln(4V_c/(e^K − 1))/(2ν0)`.
    pub t_asymptotic: f64,
    /// The estimate `1/(4ν0)` commonly quoted for `K = 1`.
    pub t_quoted: f64,
    /// `ln(1/(e − 1))/(2ν0)`, negative, hence not a valid threshold.
    pub t_log_expression: f64,
    /// Relative deviation of `t_quoted` from `t_star`.
    pub quoted_deviation: f64,
    /// True when `t_quoted` misses `t_star` by more than 1%.
    pub quoted_inconsistent: bool,
}

/// Longest `ν0 t` searched for the threshold (`sinh²` overflows past ~355).
pub const THRESHOLD_SEARCH_LIMIT: f64 = 300.0;

pub fn efficiency_threshold_time(params: &DriveParams, l0: f64, m: u32, epsilon: f64, v_c: f64) -> Result<ThresholdTime> {
    params.validate()?;
    check_positive("L0", l0)?;
    check_positive("epsilon", epsilon)?;
    check_positive("V_c", v_c)?;
    let nu0 = casimir::resonant_rate(params);
    check_positive("nu0", nu0)?;
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "mode",
            reason: "mode number must be >= 1".into(),
        });
    }
    let k = l0 / (4.0 * m as f64 * epsilon);
    let ratio_minus_one = |t: f64| -> f64 {
        let n = (nu0 * t).sinh().powi(2);
        if n == 0.0 {
            return -1.0;
        }
        k / y_approx(n / v_c) - 1.0
    };
    let mut hi = 1.0 / nu0;
    while ratio_minus_one(hi) < 0.0 {
        hi *= 2.0;
        if nu0 * hi > THRESHOLD_SEARCH_LIMIT {
            return Err(Error::NoThresholdInRange { searched_to: hi });
        }
    }
    let t_star = roots::bisect(ratio_minus_one, 0.0, hi, 0.0, 1e-15)?;

    let target = v_c / k.exp_m1();
    let t_closed_form = target.sqrt().asinh() / nu0;
    let t_asymptotic = (4.0 * target).ln() / (2.0 * nu0);
    let t_quoted = 1.0 / (4.0 * nu0);
    let t_log_expression = (1.0 / (E - 1.0)).ln() / (2.0 * nu0);
    let quoted_deviation = (t_quoted - t_star) / t_star;
    if quoted_deviation.abs() > 0.01 {
        log::warn!(
            "threshold time: exact ν0·t* = {:.6e}, quoted estimate 1/(4ν0) gives 0.25 (relative deviation {:+.3e})",
            nu0 * t_star,
            quoted_deviation
        );
    }
    Ok(ThresholdTime {
        nu0,
        t_star,
        t_closed_form,
        t_asymptotic,
        t_quoted,
        t_log_expression,
        quoted_deviation,
        quoted_inconsistent: quoted_deviation.abs() > 0.01,
    })
}
