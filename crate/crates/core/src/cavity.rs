//! Cavity geometry: time-dependent optical length, the dielectric/length
//! equivalence, and instantaneous mode frequencies.

use std::f64::consts::TAU;

use crate::error::{check_finite, check_non_negative, check_positive, Error, Result};

/// One `(time, length)` point of a piecewise-linear profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Constant {
        length: f64,
    },
    /// `L(t) = L0 + ε sin(Ω t)`.
    Sinusoidal {
        base: f64,
        amplitude: f64,
        drive_frequency: f64,
    },
    /// `L = before` for `t < at`, `L = after` for `t ≥ at`.
    Step {
        before: f64,
        after: f64,
        at: f64,
    },
    PiecewiseLinear {
        knots: Vec<Knot>,
    },
}

/// A validated time-dependent cavity length. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityProfile {
    shape: Shape,
}

/// A length discontinuity of a step profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub before: f64,
    pub after: f64,
}

impl CavityProfile {
    pub fn constant(length: f64) -> Result<Self> {
        check_positive("L0", length)?;
        Ok(CavityProfile {
            shape: Shape::Constant { length },
        })
    }

    pub fn sinusoidal(base: f64, amplitude: f64, drive_frequency: f64) -> Result<Self> {
        check_positive("L0", base)?;
        check_non_negative("epsilon", amplitude)?;
        check_non_negative("Omega", drive_frequency)?;
        if amplitude >= base {
            return Err(Error::InvalidProfile(format!(
                "oscillation amplitude {amplitude} must be smaller than L0 = {base}"
            )));
        }
        Ok(CavityProfile {
            shape: Shape::Sinusoidal {
                base,
                amplitude,
                drive_frequency,
            },
        })
    }

    pub fn step(before: f64, after: f64, at: f64) -> Result<Self> {
        check_positive("L0", before)?;
        check_positive("step_L2", after)?;
        check_finite("step_time", at)?;
        Ok(CavityProfile {
            shape: Shape::Step { before, after, at },
        })
    }

    pub fn piecewise_linear(knots: Vec<Knot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidProfile("piecewise-linear profile needs at least two knots".into()));
        }
        for k in &knots {
            check_finite("knot time", k.t)?;
            check_finite("knot length", k.length)?;
            if k.length <= 0.0 {
                return Err(Error::NonPositiveLength { t: k.t, length: k.length });
            }
        }
        if knots.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidProfile("knot times must be strictly increasing".into()));
        }
        Ok(CavityProfile {
            shape: Shape::PiecewiseLinear { knots },
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// The reference length `L0` used to define the unperturbed mode.
    pub fn base_length(&self) -> f64 {
        match &self.shape {
            Shape::Constant { length } => *length,
            Shape::Sinusoidal { base, .. } => *base,
            Shape::Step { before, .. } => *before,
            Shape::PiecewiseLinear { knots } => knots[0].length,
        }
    }

    pub fn drive_frequency(&self) -> Option<f64> {
        match &self.shape {
            Shape::Sinusoidal { drive_frequency, .. } => Some(*drive_frequency),
            _ => None,
        }
    }

    /// Closed time interval on which the profile is defined.
    pub fn domain(&self) -> (f64, f64) {
        match &self.shape {
            Shape::PiecewiseLinear { knots } => (knots[0].t, knots[knots.len() - 1].t),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        check_finite("t", t)?;
        let (start, end) = self.domain();
        if t < start || t > end {
            return Err(Error::OutsideDomain { t, start, end });
        }
        Ok(())
    }

    /// `L(t)`.
    pub fn length_at(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let (length, _) = self.eval(t);
        if length <= 0.0 {
            return Err(Error::NonPositiveLength { t, length });
        }
        Ok(length)
    }

    /// `dL/dt`. Piecewise-linear profiles take the right-hand slope at knots
    /// (the last knot takes the slope of the final segment); step profiles
    /// are not differentiable at the step time.
    pub fn length_rate(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        if let Shape::Step { at, .. } = self.shape {
            if t == at {
                return Err(Error::NotDifferentiable { t });
            }
        }
        Ok(self.eval(t).1)
    }

    /// `(L, dL/dt)` without domain checks. Valid for `t` inside the domain of
    /// a validated profile; a step time evaluates to the post-step length
    /// with zero rate.
    pub(crate) fn eval(&self, t: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Constant { length } => (*length, 0.0),
            Shape::Sinusoidal {
                base,
                amplitude,
                drive_frequency,
            } => {
                let (s, c) = (drive_frequency * t).sin_cos();
                (base + amplitude * s, amplitude * drive_frequency * c)
            }
            Shape::Step { before, after, at } => {
                if t < *at {
                    (*before, 0.0)
                } else {
                    (*after, 0.0)
                }
            }
            Shape::PiecewiseLinear { knots } => {
                // Segment i spans [knots[i], knots[i+1]); the last knot belongs
                // to the final segment.
                let idx = knots.partition_point(|k| k.t <= t);
                let seg = idx.saturating_sub(1).min(knots.len() - 2);
                let (a, b) = (knots[seg], knots[seg + 1]);
                let slope = (b.length - a.length) / (b.t - a.t);
                (a.length + slope * (t - a.t), slope)
            }
        }
    }

    /// `(L, dL/dt)` on the smooth piece containing `anchor`, extended to `t`.
    /// Gives one-sided limits at breakpoints when `anchor` lies strictly
    /// inside the piece being integrated.
    pub(crate) fn eval_on_piece(&self, t: f64, anchor: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Step { before, after, at } => {
                if anchor < *at {
                    (*before, 0.0)
                } else {
                    (*after, 0.0)
                }
            }
            Shape::PiecewiseLinear { knots } => {
                let idx = knots.partition_point(|k| k.t <= anchor);
                let seg = idx.saturating_sub(1).min(knots.len() - 2);
                let (a, b) = (knots[seg], knots[seg + 1]);
                let slope = (b.length - a.length) / (b.t - a.t);
                (a.length + slope * (t - a.t), slope)
            }
            _ => self.eval(t),
        }
    }

    /// Smallest length reached on `[t0, t1]` (a lower bound for sinusoids).
    pub fn min_length(&self, t0: f64, t1: f64) -> f64 {
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        match &self.shape {
            Shape::Constant { length } => *length,
            Shape::Sinusoidal { base, amplitude, .. } => base - amplitude,
            Shape::Step { before, after, .. } => before.min(*after),
            Shape::PiecewiseLinear { knots } => {
                let mut m = self.eval(lo).0.min(self.eval(hi).0);
                for k in knots.iter().filter(|k| k.t > lo && k.t < hi) {
                    m = m.min(k.length);
                }
                m
            }
        }
    }

    /// Points strictly inside `(t0, t1)` where `L` or `dL/dt` is discontinuous.
    pub fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        match &self.shape {
            Shape::Step { at, .. } if *at > lo && *at < hi => vec![*at],
            Shape::PiecewiseLinear { knots } => knots.iter().map(|k| k.t).filter(|&t| t > lo && t < hi).collect(),
            _ => Vec::new(),
        }
    }

    /// Length jumps inside the closed interval between `t0` and `t1`.
    pub fn jumps(&self, t0: f64, t1: f64) -> Vec<Jump> {
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        match self.shape {
            Shape::Step { before, after, at } if at >= lo && at <= hi && before != after => {
                vec![Jump { t: at, before, after }]
            }
            _ => Vec::new(),
        }
    }
}

/// A cavity mode with `m` wavelengths along the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    m: u32,
    base_length: f64,
    c: f64,
}

impl ModeSpec {
    pub fn new(m: u32, base_length: f64, c: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter {
                name: "mode",
                reason: "mode number must be >= 1".into(),
            });
        }
        check_positive("L0", base_length)?;
        check_positive("c", c)?;
        Ok(ModeSpec { m, base_length, c })
    }

    /// Mode `m` of `profile`'s reference length, in internal units (`c = 1`).
    pub fn for_profile(m: u32, profile: &CavityProfile) -> Result<Self> {
        ModeSpec::new(m, profile.base_length(), 1.0)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn base_length(&self) -> f64 {
        self.base_length
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `k_m0 = 2πm / L0`.
    pub fn wavenumber(&self) -> f64 {
        TAU * self.m as f64 / self.base_length
    }

    /// `ω_m0 = k_m0 c`.
    pub fn frequency(&self) -> f64 {
        self.wavenumber() * self.c
    }

    /// `2πmc`, the constant product `ω_m(t)·L(t)`.
    pub(crate) fn frequency_length_product(&self) -> f64 {
        TAU * self.m as f64 * self.c
    }
}

/// `ω_m(t) = 2πmc / L(t)`.
pub fn mode_frequency(profile: &CavityProfile, mode: &ModeSpec, t: f64) -> Result<f64> {
    Ok(mode.frequency_length_product() / profile.length_at(t)?)
}

/// First-order small-amplitude expansion `ω_m0 [1 − (ε/L0) sin Ωt]`, only
/// defined for sinusoidal profiles.
pub fn mode_frequency_first_order(profile: &CavityProfile, mode: &ModeSpec, t: f64) -> Option<f64> {
    match profile.shape() {
        Shape::Sinusoidal {
            base,
            amplitude,
            drive_frequency,
        } => Some(mode.frequency() * (1.0 - amplitude / base * (drive_frequency * t).sin())),
        _ => None,
    }
}

/// Time dependence of the refractive-index perturbation `δn(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexPerturbation {
    None,
    /// `δn(t) = amplitude · sin(frequency · t)`.
    Sinusoidal { amplitude: f64, frequency: f64 },
    /// Tabulated `(t, δn)` samples, linearly interpolated.
    Table(Vec<(f64, f64)>),
}

/// How `n(t)` maps onto an effective length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LengthConvention {
    /// `L = L0 (1 + δn)`, i.e. `δL = L0 δn` irrespective of `n0`.
    #[default]
    Literal,
    /// `L = L0 n(t) / n0`.
    Normalized,
}

/// Refractive index `n(t) = n0 + δn(t)` of the medium filling a fixed cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct RefractiveTrace {
    pub n0: f64,
    pub delta_n: IndexPerturbation,
}

impl RefractiveTrace {
    pub fn new(n0: f64, delta_n: IndexPerturbation) -> Result<Self> {
        check_positive("n0", n0)?;
        match &delta_n {
            IndexPerturbation::None => {}
            IndexPerturbation::Sinusoidal { amplitude, frequency } => {
                check_finite("delta_n amplitude", *amplitude)?;
                check_non_negative("delta_n frequency", *frequency)?;
                if n0 - amplitude.abs() <= 0.0 {
                    return Err(Error::InvalidProfile("refractive index n0 + δn(t) must stay positive".into()));
                }
            }
            IndexPerturbation::Table(rows) => {
                for &(t, dn) in rows {
                    check_finite("delta_n time", t)?;
                    check_finite("delta_n", dn)?;
                    if n0 + dn <= 0.0 {
                        return Err(Error::InvalidProfile(format!(
                            "refractive index n0 + δn = {} is not positive at t = {t}",
                            n0 + dn
                        )));
                    }
                }
            }
        }
        Ok(RefractiveTrace { n0, delta_n })
    }

    /// Unperturbed medium with `n0 = 1`.
    pub fn vacuum() -> Self {
        RefractiveTrace {
            n0: 1.0,
            delta_n: IndexPerturbation::None,
        }
    }
}

/// Equivalent empty-cavity profile of a fixed cavity of length `L0` filled
/// with a time-varying medium.
pub fn dielectric_to_length(trace: &RefractiveTrace, base_length: f64) -> Result<CavityProfile> {
    dielectric_to_length_with(trace, base_length, LengthConvention::Literal)
}

pub fn dielectric_to_length_with(
    trace: &RefractiveTrace,
    base_length: f64,
    convention: LengthConvention,
) -> Result<CavityProfile> {
    check_positive("L0", base_length)?;
    let scale = match convention {
        LengthConvention::Literal => 1.0,
        LengthConvention::Normalized => 1.0 / trace.n0,
    };
    match &trace.delta_n {
        IndexPerturbation::None => CavityProfile::constant(base_length),
        IndexPerturbation::Sinusoidal { amplitude, frequency } => {
            if *amplitude < 0.0 {
                return Err(Error::InvalidProfile(
                    "index modulation amplitude must be non-negative".into(),
                ));
            }
            CavityProfile::sinusoidal(base_length, base_length * amplitude * scale, *frequency)
        }
        IndexPerturbation::Table(rows) => {
            let knots = rows
                .iter()
                .map(|&(t, dn)| Knot {
                    t,
                    length: base_length * (1.0 + dn * scale),
                })
                .collect();
            CavityProfile::piecewise_linear(knots)
        }
    }
}
