//! Runs one command of a validated config into a [`ResultTable`].

use dcesim_core::casimir::{self, DriveParams};
use dcesim_core::engine::{self, BogoliubovState, EvolveOptions, Sampling};
use dcesim_core::unruh;

use crate::config::{GrowthColumn, ProfileKind, RunConfig};
use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Simulate,
    Casimir,
    Scan,
    Unruh,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Casimir => "casimir",
            Command::Scan => "scan",
            Command::Unruh => "unruh",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    /// The config lacks something this command needs.
    #[error("{command}: {reason}")]
    Config { command: &'static str, reason: String },
    #[error("{command}: {source}")]
    Numerical {
        command: &'static str,
        #[source]
        source: dcesim_core::Error,
    },
}

struct Ctx {
    command: &'static str,
}

impl Ctx {
    fn config(&self, reason: impl Into<String>) -> ScenarioError {
        ScenarioError::Config {
            command: self.command,
            reason: reason.into(),
        }
    }

    fn num<T>(&self, r: dcesim_core::Result<T>) -> Result<T, ScenarioError> {
        r.map_err(|source| ScenarioError::Numerical {
            command: self.command,
            source,
        })
    }
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { b } else { a + i as f64 * h }).collect()
        }
    }
}

pub fn sample_times(cfg: &RunConfig) -> Vec<f64> {
    linspace(0.0, cfg.numerics.t_end, cfg.numerics.sample_count)
}

pub fn run_scenario(cfg: &RunConfig, command: Command) -> Result<ResultTable, ScenarioError> {
    let ctx = Ctx {
        command: command.name(),
    };
    let mut table = match command {
        Command::Simulate => simulate(cfg, &ctx)?,
        Command::Casimir => casimir_growth(cfg, &ctx)?,
        Command::Scan => scan(cfg, &ctx)?,
        Command::Unruh => unruh_spectrum(cfg, &ctx)?,
        Command::Compare => compare(cfg, &ctx)?,
    };
    let mut meta = vec![
        ("dcesim".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("dcesim-core".to_string(), dcesim_core::VERSION.to_string()),
        ("command".to_string(), command.name().to_string()),
        ("config_sha256".to_string(), cfg.hash()),
    ];
    meta.append(&mut table.metadata);
    table.metadata = meta;
    Ok(table)
}

fn drive_params(cfg: &RunConfig, ctx: &Ctx) -> Result<DriveParams, ScenarioError> {
    let eps = cfg
        .epsilon_rel()
        .ok_or_else(|| ctx.config("needs drive.epsilon_rel or a sinusoidal profile"))?;
    let omega = cfg
        .drive_frequency()
        .ok_or_else(|| ctx.config("needs drive.Omega or a sinusoidal profile"))?;
    let mode = ctx.num(cfg.mode_spec())?;
    let p = ctx.num(DriveParams::new(eps, omega, mode.frequency()))?;
    let p = ctx.num(p.with_gamma(cfg.drive.gamma))?;
    ctx.num(p.with_zeta(cfg.drive.zeta))
}

fn simulate(cfg: &RunConfig, ctx: &Ctx) -> Result<ResultTable, ScenarioError> {
    let profile = ctx.num(cfg.profile.build())?;
    let mode = ctx.num(cfg.mode_spec())?;
    let times = sample_times(cfg);
    let opts = EvolveOptions {
        tol: cfg.numerics.tol,
        sampling: Sampling::At(times),
        ..EvolveOptions::default()
    };
    let trace = ctx.num(engine::evolve_with(
        &profile,
        &mode,
        BogoliubovState::vacuum(0.0),
        cfg.numerics.t_end,
        &opts,
    ))?;
    let mut table = ResultTable::new(["t", "re_alpha", "im_alpha", "re_beta", "im_beta", "abs_beta_sq", "invariant_drift"]);
    for s in &trace.samples {
        table.push_row(vec![
            s.t,
            s.alpha.re,
            s.alpha.im,
            s.beta.re,
            s.beta.im,
            engine::photon_number(s),
            s.invariant() - 1.0,
        ]);
    }
    let st = trace.stats;
    table.push_meta("accepted_steps", st.accepted_steps);
    table.push_meta("rejected_steps", st.rejected_steps);
    table.push_meta("jumps", st.jumps);
    table.push_meta("max_invariant_drift", format!("{:e}", st.max_invariant_drift));
    table.push_meta("max_relative_drift", format!("{:e}", st.max_relative_drift));
    Ok(table)
}

fn casimir_growth(cfg: &RunConfig, ctx: &Ctx) -> Result<ResultTable, ScenarioError> {
    let params = drive_params(cfg, ctx)?;
    let nu0 = casimir::resonant_rate(&params);
    let times = sample_times(cfg);
    let tol = cfg.numerics.tol;
    let models = &cfg.casimir.models;
    let mut columns = vec!["t"];
    let mut series: Vec<Vec<f64>> = Vec::new();
    let mut saturation_level = None;
    for model in models {
        match model {
            GrowthColumn::Ode => {
                if cfg.profile.kind != ProfileKind::Sinusoidal {
                    return Err(ctx.config("the ode model needs a sinusoidal profile"));
                }
                let profile = ctx.num(cfg.profile.build())?;
                let mode = ctx.num(cfg.mode_spec())?;
                let opts = EvolveOptions {
                    tol,
                    sampling: Sampling::At(times.clone()),
                    ..EvolveOptions::default()
                };
                let trace = ctx.num(engine::evolve_with(
                    &profile,
                    &mode,
                    BogoliubovState::vacuum(0.0),
                    cfg.numerics.t_end,
                    &opts,
                ))?;
                columns.push("N_ode");
                series.push(trace.samples.iter().map(engine::photon_number).collect());
            }
            GrowthColumn::Ideal => {
                columns.push("N_ideal");
                series.push(times.iter().map(|&t| casimir::ideal_growth(nu0, t).photons).collect());
            }
            GrowthColumn::Damped => {
                columns.push("N_damped");
                series.push(times.iter().map(|&t| casimir::damped_growth(nu0, params.gamma, t)).collect());
            }
            GrowthColumn::Saturated => {
                let sat = ctx.num(casimir::saturated_growth_at(&params, &times, tol))?;
                columns.push("N_saturated");
                series.push(sat.trace.samples.iter().map(|&(_, n)| n).collect());
                saturation_level = Some(sat.saturation_level);
            }
        }
    }
    let mut table = ResultTable::new(columns);
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        row.extend(series.iter().map(|s| s[i]));
        table.push_row(row);
    }
    table.push_meta("nu0", format!("{nu0:e}"));
    table.push_meta("gamma", format!("{:e}", params.gamma));
    table.push_meta("zeta", format!("{:e}", params.zeta));
    match saturation_level {
        Some(Some(level)) => table.push_meta("saturation_level", format!("{level:e}")),
        Some(None) => table.push_meta("saturation_level", "no plateau"),
        None => {}
    }
    Ok(table)
}

fn scan(cfg: &RunConfig, ctx: &Ctx) -> Result<ResultTable, ScenarioError> {
    let spec = cfg.scan.as_ref().ok_or_else(|| ctx.config("needs a scan block"))?;
    if cfg.profile.kind != ProfileKind::Sinusoidal {
        return Err(ctx.config("needs a sinusoidal profile"));
    }
    let eps = cfg.epsilon_rel().unwrap_or(0.0);
    let mode = ctx.num(cfg.mode_spec())?;
    let grid = linspace(spec.omega_min, spec.omega_max, spec.points);
    let points = match spec.workers {
        Some(w) => casimir::resonance_scan_with_workers(&mode, eps, &grid, cfg.numerics.t_end, cfg.numerics.tol, w),
        None => casimir::resonance_scan(&mode, eps, &grid, cfg.numerics.t_end, cfg.numerics.tol),
    };
    let points = ctx.num(points)?;
    let mut table = ResultTable::new(["Omega", "N_final"]);
    for p in &points {
        table.push_row(vec![p.drive_frequency, p.photons]);
    }
    if let Some(best) = casimir::scan_argmax(&points) {
        table.push_meta("argmax_Omega", format!("{:e}", best.drive_frequency));
    }
    Ok(table)
}

fn unruh_spectrum(cfg: &RunConfig, ctx: &Ctx) -> Result<ResultTable, ScenarioError> {
    let u = &cfg.unruh;
    let a = u.a.ok_or_else(|| ctx.config("needs unruh.a"))?;
    let (lo, hi, n) = match (u.omega_min, u.omega_max, u.omega_count) {
        (Some(lo), Some(hi), Some(n)) => (lo, hi, n),
        _ => return Err(ctx.config("needs unruh.omega_min, unruh.omega_max and unruh.omega_count")),
    };
    let k = cfg.constants();
    let omegas = linspace(lo, hi, n);
    let spectrum = ctx.num(unruh::unruh_spectrum(&omegas, a, &k))?;
    let mut table = ResultTable::new(["omega", "W_T", "W", "N"]);
    for p in &spectrum {
        table.push_row(vec![p.omega, p.thermal_energy, p.energy, p.photons]);
    }
    table.push_meta("a", format!("{a:e}"));
    table.push_meta("temperature", format!("{:e}", unruh::unruh_temperature(a, &k)));
    Ok(table)
}

fn compare(cfg: &RunConfig, ctx: &Ctx) -> Result<ResultTable, ScenarioError> {
    if cfg.profile.kind != ProfileKind::Sinusoidal {
        return Err(ctx.config("needs a sinusoidal profile (mirror amplitude epsilon)"));
    }
    let params = drive_params(cfg, ctx)?;
    let nu0 = casimir::resonant_rate(&params);
    let mode = ctx.num(cfg.mode_spec())?;
    let k = cfg.constants();
    let epsilon = cfg.profile.epsilon.unwrap_or(0.0);
    let l0 = cfg.profile.l0;
    let v_c = cfg.unruh.v_c;
    let a0 = ctx.num(unruh::mirror_peak_acceleration(epsilon, &mode))?;

    let mut table = ResultTable::new([
        "t",
        "N_m",
        "N_c",
        "y_approx",
        "y_exact",
        "a_eff_approx",
        "a_eff_exact",
        "a0",
        "R",
        "R_exact",
    ]);
    // Rows with no photons yet have no finite effective acceleration.
    for t in sample_times(cfg) {
        let n_m = casimir::ideal_growth(nu0, t).photons;
        if !(n_m > 0.0) || !n_m.is_finite() {
            continue;
        }
        let eff = ctx.num(unruh::effective_acceleration(n_m, mode.frequency(), v_c, &k))?;
        let ratio = ctx.num(unruh::acceleration_ratio(n_m, epsilon, l0, cfg.mode, v_c))?;
        table.push_row(vec![
            t,
            n_m,
            eff.n_c,
            eff.y_approx,
            eff.y_exact,
            eff.a_eff_approx,
            eff.a_eff_exact,
            a0,
            ratio.r,
            ratio.r_exact,
        ]);
    }

    table.push_meta("nu0", format!("{nu0:e}"));
    table.push_meta("threshold_occupation", format!("{:e}", v_c / l0_over_4m_eps(l0, cfg.mode, epsilon).exp_m1()));
    match unruh::efficiency_threshold_time(&params, l0, cfg.mode, epsilon, v_c) {
        Ok(th) => {
            table.push_meta("threshold_t_star", format!("{:e}", th.t_star));
            table.push_meta("threshold_nu0_t_star", format!("{:e}", th.nu0 * th.t_star));
            table.push_meta("threshold_t_asymptotic", format!("{:e}", th.t_asymptotic));
            table.push_meta("threshold_t_quoted_1_over_4nu0", format!("{:e}", th.t_quoted));
            table.push_meta("threshold_quoted_deviation", format!("{:+e}", th.quoted_deviation));
            table.push_meta(
                "threshold_quoted_flag",
                if th.quoted_inconsistent {
                    "INCONSISTENT: 1/(4 nu0) does not solve R(t) = 1"
                } else {
                    "consistent"
                },
            );
            table.push_meta("threshold_log_expression", format!("{:e} (negative for K = 1)", th.t_log_expression));
        }
        Err(dcesim_core::Error::NoThresholdInRange { searched_to }) => {
            table.push_meta("threshold_t_star", format!("none up to t = {searched_to:e}"));
        }
        Err(e) => return ctx.num(Err(e)),
    }
    Ok(table)
}

fn l0_over_4m_eps(l0: f64, m: u32, epsilon: f64) -> f64 {
    l0 / (4.0 * m as f64 * epsilon)
}
