//! Closed-form and semi-analytic models of the dynamical Casimir instability.

use rayon::prelude::*;

use crate::cavity::{CavityProfile, ModeSpec};
use crate::engine::{self, BogoliubovState, EvolveOptions, Sampling};
use crate::error::{check_finite, check_non_negative, check_positive, Error, Result};
use crate::numerics::bessel;
use crate::numerics::rk::{AdaptiveRk, OdeSystem, Tolerances};

/// Relative modulation depth above which the small-amplitude models are
/// reported as unreliable.
pub const EPSILON_REL_WARN: f64 = 0.1;

/// Parameters of a sinusoidally driven mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// Relative mirror amplitude `ε/L0`.
    pub epsilon_rel: f64,
    /// Drive angular frequency `Ω`.
    pub drive_frequency: f64,
    /// Unperturbed mode frequency `ω_m0`.
    pub mode_frequency: f64,
    /// Linear photon loss rate `γ = ω_m0/Q`.
    pub gamma: f64,
    /// Dimensionless nonlinear detuning coefficient.
    pub zeta: f64,
}

impl DriveParams {
    pub fn new(epsilon_rel: f64, drive_frequency: f64, mode_frequency: f64) -> Result<Self> {
        let p = DriveParams {
            epsilon_rel,
            drive_frequency,
            mode_frequency,
            gamma: 0.0,
            zeta: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Drive tuned to the principal resonance `Ω = 2ω_m0`.
    pub fn resonant(epsilon_rel: f64, mode_frequency: f64) -> Result<Self> {
        DriveParams::new(epsilon_rel, 2.0 * mode_frequency, mode_frequency)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        check_non_negative("gamma", gamma)?;
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_zeta(mut self, zeta: f64) -> Result<Self> {
        check_non_negative("zeta", zeta)?;
        self.zeta = zeta;
        Ok(self)
    }

    /// Quality factor `Q = ω_m0/γ` (infinite without losses).
    pub fn quality_factor(&self) -> f64 {
        self.mode_frequency / self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("epsilon_rel", self.epsilon_rel)?;
        check_non_negative("Omega", self.drive_frequency)?;
        check_positive("omega_m0", self.mode_frequency)?;
        check_non_negative("gamma", self.gamma)?;
        check_non_negative("zeta", self.zeta)?;
        if self.epsilon_rel >= 1.0 {
            return Err(Error::InvalidParameter {
                name: "epsilon_rel",
                reason: format!("must be < 1, got {}", self.epsilon_rel),
            });
        }
        if self.epsilon_rel > EPSILON_REL_WARN {
            log::warn!(
                "epsilon_rel = {} is outside the small-amplitude regime (> {EPSILON_REL_WARN})",
                self.epsilon_rel
            );
        }
        Ok(())
    }
}

/// `ρ = 2 (ε/L0) ω_m0 / Ω`.
pub fn modulation_index(params: &DriveParams) -> Result<f64> {
    check_positive("Omega", params.drive_frequency)?;
    Ok(2.0 * params.epsilon_rel * params.mode_frequency / params.drive_frequency)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// A drive frequency satisfying `(n ± 1) Ω = 2 ω_m0` for one or more
/// `(n, ±)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveResonance {
    pub drive_frequency: f64,
    pub branches: Vec<(i32, Branch)>,
}

/// All distinct positive drive frequencies with a secular coupling term for
/// Bessel orders `|n| ≤ n_max`, highest frequency first. The first entry is
/// always the principal resonance `Ω = 2ω_m0` (`n = 0`).
pub fn resonant_drive_frequencies(mode: &ModeSpec, n_max: u32) -> Vec<DriveResonance> {
    let two_w = 2.0 * mode.frequency();
    let n_max = n_max as i32;
    let mut out: Vec<DriveResonance> = Vec::new();
    for n in -n_max..=n_max {
        for (branch, divisor) in [(Branch::Plus, n + 1), (Branch::Minus, n - 1)] {
            if divisor <= 0 {
                continue;
            }
            let omega = two_w / divisor as f64;
            match out.iter_mut().find(|r| r.drive_frequency == omega) {
                Some(r) => r.branches.push((n, branch)),
                None => out.push(DriveResonance {
                    drive_frequency: omega,
                    branches: vec![(n, branch)],
                }),
            }
        }
    }
    out.sort_by(|a, b| b.drive_frequency.total_cmp(&a.drive_frequency));
    for r in &mut out {
        r.branches.sort_by_key(|&(n, b)| (n.abs(), n, b == Branch::Minus));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstant {
    pub value: f64,
    /// Whether `(n ± 1) Ω = 2 ω_m0` holds (to 1e-12 relative); off
    /// resonance the value is formal only.
    pub on_resonance: bool,
}

/// Secular coupling `ν_n = ρ Ω² J_n(ρ) / (8 ω_m0)`.
pub fn coupling_constant(n: i32, params: &DriveParams) -> Result<CouplingConstant> {
    let rho = modulation_index(params)?;
    let omega = params.drive_frequency;
    let w0 = params.mode_frequency;
    let value = rho * omega * omega / (8.0 * w0) * bessel::bessel_j(n, rho);
    let target = 2.0 * w0;
    let on_resonance = [n + 1, n - 1]
        .iter()
        .any(|&k| ((k as f64) * omega - target).abs() <= 1e-12 * target);
    Ok(CouplingConstant { value, on_resonance })
}

/// Growth rate at the principal resonance, `ν0 = (ε/L0)(ω_m0/2) J_0(ε/L0)`.
pub fn resonant_rate(params: &DriveParams) -> f64 {
    let e = params.epsilon_rel;
    e * 0.5 * params.mode_frequency * bessel::bessel_j(0, e)
}

/// `J_n(x)`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    bessel::bessel_j(n, x)
}

/// Below this `ν0 t` the short-time expansion is flagged as valid.
pub const SHORT_TIME_LIMIT: f64 = 0.1;
/// Above this `ν0 t` the exponential asymptote is flagged as valid
/// (relative error `≈ 2e^{-2ν0t}` < 0.5%).
pub const LONG_TIME_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGrowth {
    /// `sinh²(ν0 t)`.
    pub photons: f64,
    /// Leading Taylor term `(ν0 t)²`.
    pub quadratic_estimate: f64,
    /// `ν0 t`, the linear short-time law sometimes quoted for this regime.
    /// It does not follow from the Taylor expansion of `sinh²` and is kept
    /// only for comparison.
    pub linear_estimate: f64,
    /// `¼ e^{2ν0 t}`.
    pub asymptote: f64,
    pub short_time: bool,
    pub long_time: bool,
}

/// Lossless resonant growth `⟨N⟩ = sinh²(ν0 t)`.
pub fn ideal_growth(nu0: f64, t: f64) -> IdealGrowth {
    let x = nu0 * t;
    let s = x.sinh();
    IdealGrowth {
        photons: s * s,
        quadratic_estimate: x * x,
        linear_estimate: x,
        asymptote: 0.25 * (2.0 * x).exp(),
        short_time: x.abs() < SHORT_TIME_LIMIT,
        long_time: x > LONG_TIME_LIMIT,
    }
}

/// Lossy growth `⟨N⟩ = sinh²(ν0 t) e^{−γt}`.
pub fn damped_growth(nu0: f64, gamma: f64, t: f64) -> f64 {
    let s = (nu0 * t).sinh();
    s * s * (-gamma * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthModel {
    /// `|β|²` from the Bogoliubov engine.
    OdeExact,
    Ideal,
    Damped,
    /// Numerical solution of `dN/dt = [2ν0 coth(ν0 t) − γ] N`.
    DampedCothOde,
    /// Numerical solution of `dN/dt = 2ν0 sinh cosh − γN`.
    DampedBalanceOde,
    Saturated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTrace {
    pub model: GrowthModel,
    pub samples: Vec<(f64, f64)>,
    pub nu0: f64,
}

impl GrowthTrace {
    pub fn from_closed_form(model: GrowthModel, nu0: f64, times: &[f64], f: impl Fn(f64) -> f64) -> Self {
        GrowthTrace {
            model,
            samples: times.iter().map(|&t| (t, f(t))).collect(),
            nu0,
        }
    }
}

struct CothBalance {
    nu0: f64,
    gamma: f64,
}

impl OdeSystem<1> for CothBalance {
    fn rhs(&self, t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
        let x = self.nu0 * t;
        dy[0] = (2.0 * self.nu0 / x.tanh() - self.gamma) * y[0];
    }
}

/// `dN/dt = ν0 sinh(2ν0 t)(1 − ζN²) − γN`; `ζ = 0` gives the plain balance
/// equation.
struct DrivenBalance {
    nu0: f64,
    gamma: f64,
    zeta: f64,
}

impl OdeSystem<1> for DrivenBalance {
    fn rhs(&self, t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
        let n = y[0];
        let drive = self.nu0 * (2.0 * self.nu0 * t).sinh();
        dy[0] = drive * (1.0 - self.zeta * n * n) - self.gamma * n;
    }
}

fn growth_tolerances(tol: f64) -> Tolerances {
    Tolerances::new(tol, tol * 1e-12)
}

fn check_times(times: &[f64], start: f64) -> Result<()> {
    let mut prev = start;
    for &t in times {
        check_finite("sample time", t)?;
        if t < prev {
            return Err(Error::InvalidParameter {
                name: "sample times",
                reason: format!("{t} is before {prev}"),
            });
        }
        prev = t;
    }
    Ok(())
}

fn integrate_scalar<S: OdeSystem<1>>(system: &S, t0: f64, n0: f64, times: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    check_positive("tol", tol)?;
    check_times(times, t0)?;
    let mut rk = AdaptiveRk::<1>::dormand_prince(growth_tolerances(tol));
    let mut y = [n0];
    let mut t = t0;
    let mut out = Vec::with_capacity(times.len());
    for &ts in times {
        rk.advance(system, t, &mut y, ts, |_, _| Ok(()))?;
        t = ts;
        out.push((ts, y[0]));
    }
    Ok(out)
}

/// Integrates `dN/dt = [2ν0 coth(ν0 t) − γ] N` from `t0 > 0`, seeded with
/// `sinh²(ν0 t0) e^{−γ t0}`.
pub fn damped_growth_coth_ode(nu0: f64, gamma: f64, t0: f64, times: &[f64], tol: f64) -> Result<GrowthTrace> {
    check_positive("nu0", nu0)?;
    check_non_negative("gamma", gamma)?;
    check_positive("t0", t0)?;
    let seed = damped_growth(nu0, gamma, t0);
    let samples = integrate_scalar(&CothBalance { nu0, gamma }, t0, seed, times, tol)?;
    Ok(GrowthTrace {
        model: GrowthModel::DampedCothOde,
        samples,
        nu0,
    })
}

/// Integrates `dN/dt = 2ν0 sinh(ν0 t) cosh(ν0 t) − γN` from `N(0) = 0`.
pub fn damped_growth_balance_ode(nu0: f64, gamma: f64, times: &[f64], tol: f64) -> Result<GrowthTrace> {
    check_non_negative("nu0", nu0)?;
    check_non_negative("gamma", gamma)?;
    let system = DrivenBalance { nu0, gamma, zeta: 0.0 };
    let samples = integrate_scalar(&system, 0.0, 0.0, times, tol)?;
    Ok(GrowthTrace {
        model: GrowthModel::DampedBalanceOde,
        samples,
        nu0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturatedGrowth {
    pub trace: GrowthTrace,
    /// Final photon number when the trace has levelled off (relative change
    /// below [`PLATEAU_REL_CHANGE`] over the last tenth of the span).
    pub saturation_level: Option<f64>,
    /// `ζ^{-1/2}`, where the nonlinear factor cancels the drive.
    pub bound: Option<f64>,
}

pub const PLATEAU_REL_CHANGE: f64 = 1e-3;

/// Photon growth with the nonlinear detuning factor `(1 − ζN²)` on the drive
/// and linear losses, integrated from `N(0) = 0` and sampled at every
/// accepted step.
pub fn saturated_growth(params: &DriveParams, t_end: f64, tol: f64) -> Result<SaturatedGrowth> {
    check_positive("t_end", t_end)?;
    check_positive("tol", tol)?;
    params.validate()?;
    let nu0 = resonant_rate(params);
    let system = DrivenBalance {
        nu0,
        gamma: params.gamma,
        zeta: params.zeta,
    };
    let mut rk = AdaptiveRk::<1>::dormand_prince(growth_tolerances(tol));
    let mut y = [0.0];
    let mut samples = vec![(0.0, 0.0)];
    rk.advance(&system, 0.0, &mut y, t_end, |t, v| {
        samples.push((t, v[0]));
        Ok(())
    })?;
    Ok(finish_saturated(params, nu0, samples))
}

/// As [`saturated_growth`], sampled at the given non-decreasing times.
pub fn saturated_growth_at(params: &DriveParams, times: &[f64], tol: f64) -> Result<SaturatedGrowth> {
    params.validate()?;
    let nu0 = resonant_rate(params);
    let system = DrivenBalance {
        nu0,
        gamma: params.gamma,
        zeta: params.zeta,
    };
    let samples = integrate_scalar(&system, 0.0, 0.0, times, tol)?;
    Ok(finish_saturated(params, nu0, samples))
}

fn finish_saturated(params: &DriveParams, nu0: f64, samples: Vec<(f64, f64)>) -> SaturatedGrowth {
    let bound = (params.zeta > 0.0).then(|| params.zeta.powf(-0.5));
    let saturation_level = detect_plateau(&samples);
    SaturatedGrowth {
        trace: GrowthTrace {
            model: GrowthModel::Saturated,
            samples,
            nu0,
        },
        saturation_level,
        bound,
    }
}

fn detect_plateau(samples: &[(f64, f64)]) -> Option<f64> {
    let &(t_last, n_last) = samples.last()?;
    let t_first = samples.first()?.0;
    if n_last <= 0.0 || t_last <= t_first {
        return None;
    }
    let t_mark = t_last - 0.1 * (t_last - t_first);
    let idx = samples.partition_point(|&(t, _)| t <= t_mark).checked_sub(1)?;
    let n_mark = samples[idx].1;
    ((n_last - n_mark).abs() <= PLATEAU_REL_CHANGE * n_last).then_some(n_last)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub drive_frequency: f64,
    pub photons: f64,
}

/// Final photon number `|β(t_end)|²` of `mode` for each drive frequency in
/// `grid`, using a sinusoidal profile of relative amplitude `epsilon_rel`.
/// Grid points run in parallel; results keep the grid order.
pub fn resonance_scan(
    mode: &ModeSpec,
    epsilon_rel: f64,
    grid: &[f64],
    t_end: f64,
    tol: f64,
) -> Result<Vec<ScanPoint>> {
    check_non_negative("epsilon_rel", epsilon_rel)?;
    check_positive("t_end", t_end)?;
    for &omega in grid {
        check_positive("Omega", omega)?;
    }
    let l0 = mode.base_length();
    let opts = EvolveOptions {
        tol,
        sampling: Sampling::Final,
        ..EvolveOptions::default()
    };
    grid.par_iter()
        .map(|&omega| {
            let profile = CavityProfile::sinusoidal(l0, epsilon_rel * l0, omega)?;
            let trace = engine::evolve_with(&profile, mode, BogoliubovState::vacuum(0.0), t_end, &opts)?;
            Ok(ScanPoint {
                drive_frequency: omega,
                photons: engine::photon_number(trace.last()),
            })
        })
        .collect()
}

/// [`resonance_scan`] on a dedicated pool of `workers` threads.
pub fn resonance_scan_with_workers(
    mode: &ModeSpec,
    epsilon_rel: f64,
    grid: &[f64],
    t_end: f64,
    tol: f64,
    workers: usize,
) -> Result<Vec<ScanPoint>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "workers",
            reason: e.to_string(),
        })?;
    pool.install(|| resonance_scan(mode, epsilon_rel, grid, t_end, tol))
}

/// Grid point with the largest photon number (first one on ties).
pub fn scan_argmax(points: &[ScanPoint]) -> Option<ScanPoint> {
    points.iter().copied().fold(None, |best: Option<ScanPoint>, p| match best {
        Some(b) if b.photons >= p.photons => Some(b),
        _ => Some(p),
    })
}
