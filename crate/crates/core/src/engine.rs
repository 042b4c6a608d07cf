//! Mode-operator evolution in a cavity of time-varying length.
//!
//! The slowly varying amplitudes obey `dA/dt = ν(t) A⁺`, `dA⁺/dt = ν*(t) A`
//! with coupling `ν(t) = (L'/2L) e^{2iφ(t)}` and phase `φ(t) = ∫ω_m dt`.
//! Writing `A(t) = α A(0) − β A⁺(0)` turns this into the linear system
//!
//! ```text
//! α' = −ν β*,   β' = −ν α*,   φ' = ω_m(t)
//! ```
//!
//! which conserves `|α|² − |β|² = 1`. Length discontinuities are crossed
//! with the exact sudden-jump map (phase frozen at the jump time).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::cavity::{CavityProfile, Jump, ModeSpec, Shape};
use crate::error::{check_finite, check_positive, Error, Result};
use crate::numerics::quad::{self, gauss_kronrod_15};
use crate::numerics::rk::{AdaptiveRk, OdeSystem, Tolerances};

/// Default relative per-step tolerance of [`evolve`].
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Ratio between the allowed invariant drift and the step tolerance.
pub const INVARIANT_DRIFT_FACTOR: f64 = 100.0;

/// Bogoliubov coefficients of one mode relative to the vacuum at the start
/// of the evolution, together with the accumulated phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovState {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub phi: f64,
    pub t: f64,
}

impl BogoliubovState {
    pub fn vacuum(t: f64) -> Self {
        BogoliubovState {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            phi: 0.0,
            t,
        }
    }

    /// `|α|² − |β|²`; equal to one for a bosonic transformation.
    pub fn invariant(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    /// `| |α|² − |β|² − 1 |`.
    pub fn invariant_drift(&self) -> f64 {
        (self.invariant() - 1.0).abs()
    }

    /// Drift divided by `|α|² + |β|²`, the size of the floating-point
    /// rounding floor on the invariant.
    pub fn relative_invariant_drift(&self) -> f64 {
        self.invariant_drift() / (self.alpha.norm_sqr() + self.beta.norm_sqr())
    }

    fn to_vector(self) -> [f64; 5] {
        [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im, self.phi]
    }

    fn from_vector(t: f64, y: &[f64; 5]) -> Self {
        BogoliubovState {
            alpha: Complex64::new(y[0], y[1]),
            beta: Complex64::new(y[2], y[3]),
            phi: y[4],
            t,
        }
    }
}

/// `⟨0|A⁺(t)A(t)|0⟩ = |β|²`.
pub fn photon_number(state: &BogoliubovState) -> f64 {
    state.beta.norm_sqr()
}

#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct IntegratorStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    pub jumps: usize,
    /// Largest `| |α|² − |β|² − 1 |` seen at any accepted step.
    pub max_invariant_drift: f64,
    /// Largest drift relative to `|α|² + |β|²`.
    pub max_relative_drift: f64,
    pub max_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub samples: Vec<BogoliubovState>,
    pub stats: IntegratorStats,
}

impl EvolutionTrace {
    pub fn last(&self) -> &BogoliubovState {
        self.samples.last().expect("trace always holds at least one sample")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// The initial state and every accepted integrator step.
    EveryStep,
    /// Exactly the listed times, which must be ordered in the direction of
    /// integration and lie inside the span.
    At(Vec<f64>),
    /// Only the final state.
    Final,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub tol: f64,
    pub sampling: Sampling,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            tol: DEFAULT_TOLERANCE,
            sampling: Sampling::EveryStep,
            max_steps: 50_000_000,
        }
    }
}

struct ModeEquations<'a> {
    profile: &'a CavityProfile,
    frequency_length: f64,
    /// A time strictly inside the smooth piece being integrated.
    anchor: f64,
}

impl OdeSystem<5> for ModeEquations<'_> {
    fn rhs(&self, t: f64, y: &[f64; 5], dy: &mut [f64; 5]) {
        let (length, rate) = self.profile.eval_on_piece(t, self.anchor);
        let g = 0.5 * rate / length;
        let (s, c) = (2.0 * y[4]).sin_cos();
        let (nr, ni) = (g * c, g * s);
        // ν β*
        let (ar, ai) = (y[0], y[1]);
        let (br, bi) = (y[2], y[3]);
        dy[0] = -(nr * br + ni * bi);
        dy[1] = -(ni * br - nr * bi);
        // ν α*
        dy[2] = -(nr * ar + ni * ai);
        dy[3] = -(ni * ar - nr * ai);
        dy[4] = self.frequency_length / length;
    }

    fn error_scale(&self, y: &[f64; 5], y_new: &[f64; 5], tol: &Tolerances, scale: &mut [f64; 5]) {
        // (α, β) share one norm-wise scale so zero crossings of individual
        // components do not throttle the step.
        let size = y[..4]
            .iter()
            .chain(y_new[..4].iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let s = tol.atol + tol.rtol * size;
        scale[..4].fill(s);
        scale[4] = tol.atol + tol.rtol * y[4].abs().max(y_new[4].abs());
    }
}

/// Largest step that still resolves `e^{2iφ}` and the drive.
fn max_step(profile: &CavityProfile, mode: &ModeSpec, t0: f64, t1: f64) -> f64 {
    let omega_max = mode.frequency_length_product() / profile.min_length(t0, t1);
    let fastest = (2.0 * omega_max).max(profile.drive_frequency().unwrap_or(0.0));
    TAU / (20.0 * fastest)
}

fn apply_jump(state: &mut BogoliubovState, jump: &Jump, forward: bool) {
    let r = 0.5 * (jump.after / jump.before).ln();
    let r = if forward { r } else { -r };
    let (ch, sh) = (r.cosh(), r.sinh());
    let e = Complex64::from_polar(1.0, 2.0 * state.phi);
    let alpha = state.alpha * ch - e * sh * state.beta.conj();
    let beta = state.beta * ch - e * sh * state.alpha.conj();
    state.alpha = alpha;
    state.beta = beta;
}

/// Evolves the vacuum at `t = 0` to `t_end`, sampling every accepted step.
pub fn evolve(profile: &CavityProfile, mode: &ModeSpec, t_end: f64, tol: f64) -> Result<EvolutionTrace> {
    check_positive("t_end", t_end)?;
    let opts = EvolveOptions {
        tol,
        ..EvolveOptions::default()
    };
    evolve_with(profile, mode, BogoliubovState::vacuum(0.0), t_end, &opts)
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
enum Event {
    Breakpoint,
    Jump(usize),
    Sample,
}

/// Evolves `initial` (taken at `initial.t`) to `t_end`, forward or backward.
///
/// A length jump located exactly at `initial.t` is treated as lying ahead of
/// the initial state; the state stored for any time `t` is the one after a
/// jump at `t` in the direction of integration.
pub fn evolve_with(
    profile: &CavityProfile,
    mode: &ModeSpec,
    initial: BogoliubovState,
    t_end: f64,
    opts: &EvolveOptions,
) -> Result<EvolutionTrace> {
    check_positive("tol", opts.tol)?;
    check_finite("t_end", t_end)?;
    let t0 = initial.t;
    profile.length_at(t0)?;
    profile.length_at(t_end)?;
    let forward = t_end >= t0;
    let ahead = |a: f64, b: f64| if forward { a < b } else { a > b };

    let jumps = profile.jumps(t0, t_end);
    let mut events: Vec<(f64, Event)> = profile
        .breakpoints(t0, t_end)
        .into_iter()
        .map(|t| (t, Event::Breakpoint))
        .chain(jumps.iter().enumerate().map(|(i, j)| (j.t, Event::Jump(i))))
        .collect();
    events.push((t_end, Event::Breakpoint));
    if let Sampling::At(times) = &opts.sampling {
        let mut prev = t0;
        for &ts in times {
            check_finite("sample time", ts)?;
            if ahead(ts, prev) || ahead(t_end, ts) {
                return Err(Error::InvalidParameter {
                    name: "sample times",
                    reason: format!("{ts} is out of order or outside [{t0}, {t_end}]"),
                });
            }
            prev = ts;
            events.push((ts, Event::Sample));
        }
    }
    events.sort_by(|a, b| {
        let ord = a.0.partial_cmp(&b.0).expect("finite event times");
        let ord = if forward { ord } else { ord.reverse() };
        ord.then(a.1.partial_cmp(&b.1).expect("ordered events"))
    });

    let frequency_length = mode.frequency_length_product();
    let h_max = max_step(profile, mode, t0, t_end);
    let mut rk = AdaptiveRk::<5>::dop853(Tolerances::new(opts.tol, opts.tol))
        .with_max_step(h_max)
        .with_max_steps(opts.max_steps);

    let every_step = matches!(opts.sampling, Sampling::EveryStep);
    let mut stats = IntegratorStats {
        max_invariant_drift: initial.invariant_drift(),
        max_relative_drift: initial.relative_invariant_drift(),
        max_step: h_max,
        ..IntegratorStats::default()
    };
    let mut samples = Vec::new();
    if every_step {
        samples.push(initial);
    }
    let drift_factor = INVARIANT_DRIFT_FACTOR * opts.tol;
    let track = |state: &BogoliubovState, stats: &mut IntegratorStats| -> Result<()> {
        let drift = state.invariant_drift();
        let size = state.alpha.norm_sqr() + state.beta.norm_sqr();
        stats.max_invariant_drift = stats.max_invariant_drift.max(drift);
        stats.max_relative_drift = stats.max_relative_drift.max(drift / size);
        let limit = drift_factor * size.max(1.0);
        if drift > limit || !drift.is_finite() {
            return Err(Error::InvariantViolation {
                t: state.t,
                drift,
                limit,
            });
        }
        Ok(())
    };

    let mut state = initial;
    let mut y = state.to_vector();
    for (te, event) in events {
        if te != state.t {
            let t_start = state.t;
            let system = ModeEquations {
                profile,
                frequency_length,
                anchor: 0.5 * (t_start + te),
            };
            rk.advance(&system, t_start, &mut y, te, |t, v| {
                let s = BogoliubovState::from_vector(t, v);
                track(&s, &mut stats)?;
                if every_step {
                    samples.push(s);
                }
                Ok(())
            })?;
            state = BogoliubovState::from_vector(te, &y);
        }
        match event {
            Event::Breakpoint => {}
            Event::Jump(i) => {
                apply_jump(&mut state, &jumps[i], forward);
                y = state.to_vector();
                stats.jumps += 1;
                track(&state, &mut stats)?;
                if every_step {
                    if samples.last().map(|s| s.t) == Some(te) {
                        samples.pop();
                    }
                    samples.push(state);
                }
            }
            Event::Sample => samples.push(state),
        }
    }
    if matches!(opts.sampling, Sampling::Final) {
        samples.push(state);
    }
    let rk_stats = rk.stats();
    stats.accepted_steps = rk_stats.accepted;
    stats.rejected_steps = rk_stats.rejected;
    stats.rhs_evals = rk_stats.rhs_evals;
    if samples.is_empty() {
        samples.push(state);
    }
    Ok(EvolutionTrace { samples, stats })
}

/// Splits `[t0, t1]` at profile breakpoints and into panels no longer than
/// `max_len`.
fn panels(profile: &CavityProfile, t0: f64, t1: f64, max_len: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![t0];
    cuts.extend(profile.breakpoints(t0, t1));
    cuts.push(t1);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n = ((b - a) / max_len).ceil().max(1.0) as usize;
        for i in 0..n {
            let lo = a + (b - a) * i as f64 / n as f64;
            let hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
            out.push((lo, hi));
        }
    }
    out
}

const QUAD_REL_TOL: f64 = 1e-13;

/// `φ(t) = ∫_0^t ω_m(t') dt'` by adaptive quadrature of `2πmc/L`.
pub fn phase_integral(profile: &CavityProfile, mode: &ModeSpec, t: f64) -> Result<f64> {
    check_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "phase integral starts at t = 0".into(),
        });
    }
    profile.length_at(0.0)?;
    profile.length_at(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let wl = mode.frequency_length_product();
    if let Shape::Constant { length } = profile.shape() {
        return Ok(wl / length * t);
    }
    let panel = 4.0 * max_step(profile, mode, 0.0, t);
    let mut phi = 0.0;
    for (a, b) in panels(profile, 0.0, t, panel) {
        phi += phase_increment(profile, wl, a, b)?;
    }
    Ok(phi)
}

fn phase_increment(profile: &CavityProfile, wl: f64, a: f64, b: f64) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let scale = wl / profile.eval(mid).0 * (b - a);
    quad::integrate(
        |x| wl / profile.eval(x).0,
        a,
        b,
        1e-15 * scale,
        QUAD_REL_TOL,
    )
}

/// `ν(t) = (L'/2L) e^{2iφ(t)}`.
pub fn coupling(profile: &CavityProfile, mode: &ModeSpec, t: f64) -> Result<Complex64> {
    let rate = profile.length_rate(t)?;
    let length = profile.length_at(t)?;
    let phi = phase_integral(profile, mode, t)?;
    Ok(Complex64::from_polar(0.5 * rate / length, 2.0 * phi))
}

/// Small-amplitude closed form of the coupling for a sinusoidal profile:
/// `(εΩ/2L(t)) cos Ωt · exp(i[2ω_m0 t + ρ cos Ωt])` with `ρ = 2εω_m0/(ΩL0)`.
pub fn coupling_first_order(profile: &CavityProfile, mode: &ModeSpec, t: f64) -> Option<Complex64> {
    match *profile.shape() {
        Shape::Sinusoidal {
            base,
            amplitude,
            drive_frequency,
        } if drive_frequency > 0.0 => {
            let w0 = mode.frequency();
            let length = base + amplitude * (drive_frequency * t).sin();
            let rho = 2.0 * amplitude * w0 / (drive_frequency * base);
            let c = (drive_frequency * t).cos();
            let magnitude = amplitude * drive_frequency / (2.0 * length) * c;
            Some(Complex64::from_polar(magnitude, 2.0 * w0 * t + rho * c))
        }
        _ => None,
    }
}

/// `r(t) = ∫_0^t ν(t') dt'`, with length jumps contributing the boundary term
/// `½ ln(L₂/L₁) e^{2iφ(t_jump)}`.
pub fn squeezing_integral(profile: &CavityProfile, mode: &ModeSpec, t: f64) -> Result<Complex64> {
    check_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "squeezing integral starts at t = 0".into(),
        });
    }
    profile.length_at(0.0)?;
    profile.length_at(t)?;
    let wl = mode.frequency_length_product();
    let mut r = Complex64::new(0.0, 0.0);
    if t == 0.0 {
        return Ok(r);
    }
    let jumps = profile.jumps(0.0, t);
    let panel = 2.0 * max_step(profile, mode, 0.0, t);
    let mut phi = 0.0;
    for (a, b) in panels(profile, 0.0, t, panel) {
        for j in jumps.iter().filter(|j| j.t == a) {
            r += Complex64::from_polar(0.5 * (j.after / j.before).ln(), 2.0 * phi);
        }
        let phi_a = phi;
        // Size of the integrand over the panel, times the rounding floor set
        // by the magnitude of the accumulated phase.
        let panel_scale = [a, 0.5 * (a + b), b]
            .iter()
            .map(|&x| {
                let (l, rate) = profile.eval(x);
                (0.5 * rate / l).abs()
            })
            .fold(0.0, f64::max)
            * (b - a);
        let floor = QUAD_REL_TOL.max(64.0 * f64::EPSILON * (1.0 + phi_a.abs()));
        let piece: Complex64 = quad::integrate(
            |x| {
                let (l, rate) = profile.eval(x);
                if rate == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let mut local = |s: f64| wl / profile.eval(s).0;
                let (dphi, _) = gauss_kronrod_15(&mut local, a, x);
                Complex64::from_polar(0.5 * rate / l, 2.0 * (phi_a + dphi))
            },
            a,
            b,
            floor * panel_scale.max(f64::MIN_POSITIVE),
            QUAD_REL_TOL,
        )?;
        r += piece;
        phi += phase_increment(profile, wl, a, b)?;
    }
    for j in jumps.iter().filter(|j| j.t == t) {
        r += Complex64::from_polar(0.5 * (j.after / j.before).ln(), 2.0 * phi);
    }
    Ok(r)
}
