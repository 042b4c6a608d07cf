//! Adaptive explicit Runge–Kutta integrators with embedded error control:
//! Dormand–Prince 5(4) and the 8(5,3) pair of Dormand and Prince (DOP853).
//!
//! The integrator works on fixed-size real state vectors. Complex systems
//! split their state into real and imaginary parts. Integration may run
//! forward or backward in time; step-size state carries over between
//! successive [`AdaptiveRk::advance`] calls so a long run can be split at
//! breakpoints or output times without restarting the controller.

use crate::error::{Error, Result};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);

    /// Per-component error scale. The default is the usual mixed
    /// absolute/relative weight `atol + rtol·max(|y_i|, |y_new_i|)`.
    fn error_scale(&self, y: &[f64; N], y_new: &[f64; N], tol: &Tolerances, scale: &mut [f64; N]) {
        for i in 0..N {
            scale[i] = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Tolerances { rtol, atol }
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

enum ErrorEstimate {
    /// Max-norm of `h Σ e_j k_j`, `k_{s}` being the FSAL derivative.
    Embedded(&'static [f64]),
    /// Combined 5th/3rd order estimate of DOP853 (RMS norm).
    Dop853 { e3: &'static [f64], e5: &'static [f64] },
}

/// Coefficients of an explicit FSAL Runge–Kutta pair.
pub struct Tableau {
    c: &'static [f64],
    a: &'static [&'static [f64]],
    b: &'static [f64],
    error: ErrorEstimate,
    /// Step-size exponent `1/(q+1)` of the error estimator.
    exponent: f64,
}

const DP5_C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0];
const DP5_A: [&[f64]; 6] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
];
const DP5_B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// Difference between the 5th and embedded 4th order weights.
const DP5_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub static DORMAND_PRINCE_5: Tableau = Tableau {
    c: &DP5_C,
    a: &DP5_A,
    b: &DP5_B,
    error: ErrorEstimate::Embedded(&DP5_E),
    exponent: 0.2,
};

// DOP853 coefficients (Hairer, Nørsett & Wanner, `dop853.f`).
const DOP853_C: [f64; 12] = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0];
const DOP853_A: [&[f64]; 12] = [
    &[],
    &[0.05260015195876773],
    &[0.0197250569845379, 0.0591751709536137],
    &[0.02958758547680685, 0.0, 0.08876275643042054],
    &[0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792],
    &[0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242],
    &[0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125],
    &[0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023],
    &[0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996],
    &[0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627],
    &[-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196],
    &[2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636],
];
const DOP853_B: [f64; 12] = [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259];
const DOP853_E3: [f64; 13] = [-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0];
const DOP853_E5: [f64; 13] = [0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0];

pub static DOP853: Tableau = Tableau {
    c: &DOP853_C,
    a: &DOP853_A,
    b: &DOP853_B,
    error: ErrorEstimate::Dop853 {
        e3: &DOP853_E3,
        e5: &DOP853_E5,
    },
    exponent: 1.0 / 8.0,
};

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

#[derive(Clone)]
pub struct AdaptiveRk<const N: usize> {
    tableau: &'static Tableau,
    tol: Tolerances,
    h_max: f64,
    max_steps: usize,
    h_next: Option<f64>,
    stats: Stats,
}

impl<const N: usize> AdaptiveRk<N> {
    pub fn new(tableau: &'static Tableau, tol: Tolerances) -> Self {
        AdaptiveRk {
            tableau,
            tol,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
            h_next: None,
            stats: Stats::default(),
        }
    }

    pub fn dormand_prince(tol: Tolerances) -> Self {
        AdaptiveRk::new(&DORMAND_PRINCE_5, tol)
    }

    pub fn dop853(tol: Tolerances) -> Self {
        AdaptiveRk::new(&DOP853, tol)
    }

    /// Caps the magnitude of every step.
    pub fn with_max_step(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Total accepted + rejected step budget across all `advance` calls.
    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    fn error_norm(&self, k: &[[f64; N]], h: f64, scale: &[f64; N]) -> f64 {
        match self.tableau.error {
            ErrorEstimate::Embedded(e) => {
                let mut err: f64 = 0.0;
                for i in 0..N {
                    let s: f64 = e.iter().zip(k).map(|(ej, kj)| ej * kj[i]).sum();
                    err = err.max((h * s).abs() / scale[i]);
                }
                err
            }
            ErrorEstimate::Dop853 { e3, e5 } => {
                let (mut n5, mut n3) = (0.0, 0.0);
                for i in 0..N {
                    let s5: f64 = e5.iter().zip(k).map(|(ej, kj)| ej * kj[i]).sum::<f64>() / scale[i];
                    let s3: f64 = e3.iter().zip(k).map(|(ej, kj)| ej * kj[i]).sum::<f64>() / scale[i];
                    n5 += s5 * s5;
                    n3 += s3 * s3;
                }
                if n5 == 0.0 && n3 == 0.0 {
                    return 0.0;
                }
                h.abs() * n5 / ((n5 + 0.01 * n3) * N as f64).sqrt()
            }
        }
    }

    /// Integrates `y` from `t0` to `t1` (either direction). `on_step` is
    /// called after every accepted step with the new time and state; an
    /// error returned from it aborts the integration.
    pub fn advance<S, F>(&mut self, sys: &S, t0: f64, y: &mut [f64; N], t1: f64, mut on_step: F) -> Result<()>
    where
        S: OdeSystem<N>,
        F: FnMut(f64, &[f64; N]) -> Result<()>,
    {
        if t1 == t0 {
            return Ok(());
        }
        let tab = self.tableau;
        let stages = tab.b.len();
        let dir = (t1 - t0).signum();
        let mut t = t0;
        // k[0..stages] are the stages, k[stages] the derivative at the new point.
        let mut k = vec![[0.0; N]; stages + 1];
        sys.rhs(t, y, &mut k[0]);
        self.stats.rhs_evals += 1;

        let mut h_abs = match self.h_next {
            Some(h) => h,
            None => self.initial_step(sys, t, y, &k[0], dir),
        }
        .min(self.h_max)
        .min((t1 - t0).abs());

        let mut ytmp = [0.0; N];
        let mut ynew = [0.0; N];
        let mut scale = [0.0; N];
        let mut rejected_last = false;

        loop {
            if self.stats.accepted + self.stats.rejected >= self.max_steps {
                return Err(Error::ToleranceNotMet {
                    t,
                    reason: format!("step budget of {} exhausted", self.max_steps),
                });
            }
            let remaining = (t1 - t).abs();
            let last = h_abs >= remaining * (1.0 - 1e-13);
            let h_try = if last { remaining } else { h_abs };
            let h = dir * h_try;

            for s in 1..stages {
                for i in 0..N {
                    let inc: f64 = tab.a[s].iter().zip(&k[..s]).map(|(a, ks)| a * ks[i]).sum();
                    ytmp[i] = y[i] + h * inc;
                }
                sys.rhs(t + tab.c[s] * h, &ytmp, &mut k[s]);
            }
            for i in 0..N {
                let inc: f64 = tab.b.iter().zip(&k[..stages]).map(|(b, ks)| b * ks[i]).sum();
                ynew[i] = y[i] + h * inc;
            }
            let t_new = if last { t1 } else { t + h };
            sys.rhs(t_new, &ynew, &mut k[stages]);
            self.stats.rhs_evals += stages;

            sys.error_scale(y, &ynew, &self.tol, &mut scale);
            let err = self.error_norm(&k, h, &scale);
            if !err.is_finite() {
                return Err(Error::ToleranceNotMet {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }

            if err <= 1.0 {
                self.stats.accepted += 1;
                t = t_new;
                *y = ynew;
                k[0] = k[stages];
                on_step(t, y)?;

                let mut fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * err.powf(-tab.exponent)).clamp(FAC_MIN, FAC_MAX)
                };
                if rejected_last {
                    fac = fac.min(1.0);
                }
                rejected_last = false;
                let proposal = (h_try * fac).min(self.h_max);
                if last {
                    // A truncated final step says little about the natural step size.
                    self.h_next = Some(if h_try >= h_abs * 0.5 { proposal } else { h_abs });
                    return Ok(());
                }
                h_abs = proposal;
            } else {
                self.stats.rejected += 1;
                rejected_last = true;
                let fac = (SAFETY * err.powf(-tab.exponent)).clamp(FAC_MIN, 1.0);
                h_abs = h_try * fac;
                if h_abs <= f64::EPSILON * 16.0 * t.abs().max(1.0) {
                    return Err(Error::ToleranceNotMet {
                        t,
                        reason: format!("step size underflow (h = {h_abs:e})"),
                    });
                }
            }
        }
    }

    fn initial_step<S: OdeSystem<N>>(&mut self, sys: &S, t: f64, y: &[f64; N], f0: &[f64; N], dir: f64) -> f64 {
        let mut scale = [0.0; N];
        sys.error_scale(y, y, &self.tol, &mut scale);
        let norm = |v: &[f64; N]| -> f64 {
            let s: f64 = v.iter().zip(scale.iter()).map(|(x, w)| (x / w) * (x / w)).sum();
            (s / N as f64).sqrt()
        };
        let d0 = norm(y);
        let d1 = norm(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.h_max);
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y[i] + dir * h0 * f0[i];
        }
        let mut f1 = [0.0; N];
        sys.rhs(t + dir * h0, &y1, &mut f1);
        self.stats.rhs_evals += 1;
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - f0[i];
        }
        let d2 = norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(self.tableau.exponent)
        };
        (100.0 * h0).min(h1).min(self.h_max)
    }
}
