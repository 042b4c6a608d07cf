use std::f64::consts::TAU;

use dcesim_core::casimir::{
    bessel_j, coupling_constant, damped_growth, damped_growth_balance_ode, damped_growth_coth_ode, ideal_growth,
    modulation_index, resonance_scan, resonance_scan_with_workers, resonant_drive_frequencies, resonant_rate,
    saturated_growth, saturated_growth_at, scan_argmax, Branch, DriveParams,
};
use dcesim_core::cavity::{CavityProfile, ModeSpec};
use dcesim_core::engine::{evolve_with, photon_number, BogoliubovState, EvolveOptions, Sampling};
use proptest::prelude::*;

/// `Σ (−1)^k (x/2)^{2k+n} / (k! (n+k)!)`, summed until terms vanish.
fn bessel_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..60u32 {
        term *= -half * half / (f64::from(k) * f64::from(n + k));
        sum += term;
        if term.abs() < 1e-20 * sum.abs() {
            break;
        }
    }
    sum
}

/// Composite Simpson rule on `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn unit_mode() -> ModeSpec {
    ModeSpec::new(1, TAU, 1.0).unwrap()
}

#[test]
fn bessel_matches_power_series_on_unit_interval() {
    for n in 0..6 {
        for i in 0..=40 {
            let x = -1.0 + 0.05 * i as f64;
            let got = bessel_j(n as i32, x);
            let want = bessel_series(n, x);
            assert!((got - want).abs() <= 1e-12, "J{n}({x}) = {got}, series {want}");
        }
    }
    assert!((bessel_j(0, 0.01) - 0.999_975_000_156_25).abs() < 1e-14);
    assert!((bessel_j(1, 0.1) - 0.049_937_526_036_242).abs() < 1e-14);
}

#[test]
fn bessel_recurrence_holds() {
    for n in 1..8 {
        for i in 1..=60 {
            let x = 0.25 * i as f64;
            let lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
            let rhs = 2.0 * n as f64 / x * bessel_j(n, x);
            assert!((lhs - rhs).abs() <= 1e-10, "n = {n}, x = {x}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn modulation_index_examples() {
    let p = DriveParams::resonant(0.003, 1.0).unwrap();
    assert!((modulation_index(&p).unwrap() - 0.003).abs() < 1e-18);
    let p = DriveParams::new(0.01, 1.0, 1.0).unwrap();
    assert!((modulation_index(&p).unwrap() - 0.02).abs() < 1e-16);
    let p = DriveParams::new(0.0, 2.0, 1.0).unwrap();
    assert_eq!(modulation_index(&p).unwrap(), 0.0);
}

#[test]
fn resonance_list() {
    let mode = unit_mode();
    let only = resonant_drive_frequencies(&mode, 0);
    assert_eq!(only.len(), 1);
    assert!((only[0].drive_frequency - 2.0).abs() < 1e-15);
    let list = resonant_drive_frequencies(&mode, 3);
    assert!(list.windows(2).all(|w| w[0].drive_frequency > w[1].drive_frequency));
    let unit = list.iter().find(|r| (r.drive_frequency - 1.0).abs() < 1e-15).unwrap();
    assert!(unit.branches.contains(&(1, Branch::Plus)));
    assert!(!unit.branches.contains(&(1, Branch::Minus)));
    assert!(list.iter().all(|r| r.drive_frequency.is_finite() && r.drive_frequency > 0.0));
}

#[test]
fn coupling_constant_examples() {
    let p = DriveParams::resonant(0.01, 1.0).unwrap();
    let nu = coupling_constant(0, &p).unwrap();
    assert!(nu.on_resonance);
    assert!((nu.value - 0.004_999_875).abs() < 1e-9, "{}", nu.value);
    let p = DriveParams::resonant(0.1, 1.0).unwrap();
    let want = 0.1 * 0.5 * bessel_series(0, 0.1);
    assert!((resonant_rate(&p) - want).abs() < 1e-15);
    assert!((resonant_rate(&p) - 0.049_875_078).abs() < 1e-9);
    let zero = DriveParams::resonant(0.0, 1.0).unwrap();
    for n in -3..=3 {
        assert_eq!(coupling_constant(n, &zero).unwrap().value, 0.0);
    }
}

#[test]
fn ideal_growth_examples() {
    assert_eq!(ideal_growth(0.3, 0.0).photons, 0.0);
    let g = ideal_growth(1.0, 1.0);
    assert!((g.photons - 1.381_097_845_541_816_5).abs() < 1e-14);
    let g = ideal_growth(1.0, 5.0);
    let gap = g.asymptote / g.photons - 1.0;
    assert!((gap - 9.08e-5).abs() < 1e-6, "{gap}");
    assert!(g.long_time);
    assert!(ideal_growth(1.0, 0.01).short_time);
}

#[test]
fn coth_balance_matches_closed_form() {
    let nu0 = 5e-4;
    let t0 = 1e-6 / nu0;
    let times: Vec<f64> = (1..=50).map(|i| 0.1 * i as f64 / nu0).collect();
    for &g in &[0.0, 0.01, 0.05, 0.1] {
        let gamma = g * nu0;
        let trace = damped_growth_coth_ode(nu0, gamma, t0, &times, 1e-12).unwrap();
        for &(t, n) in &trace.samples {
            let closed = damped_growth(nu0, gamma, t);
            assert!((n / closed - 1.0).abs() <= 1e-6, "γ = {g}ν0, ν0t = {}: {n} vs {closed}", nu0 * t);
        }
    }
}

#[test]
fn strong_loss_plateau() {
    let nu0 = 0.7;
    for x in [10.0, 15.0, 25.0, 40.0] {
        let n = damped_growth(nu0, 2.0 * nu0, x / nu0);
        assert!((n - 0.25).abs() <= 1e-6, "ν0t = {x}: {n}");
    }
    assert!(damped_growth(nu0, 4.0 * nu0, 40.0 / nu0) < 1e-15);
}

#[test]
fn balance_equation_against_quadrature() {
    // N(t) = ∫_0^t ν0 sinh(2ν0 s) e^{−γ(t−s)} ds.
    let nu0 = 1.0;
    let times = [0.5, 1.0, 2.0, 3.0];
    for &gamma in &[0.0, 0.1, 0.7] {
        let trace = damped_growth_balance_ode(nu0, gamma, &times, 1e-12).unwrap();
        for &(t, n) in &trace.samples {
            let oracle = simpson(|s| nu0 * (2.0 * nu0 * s).sinh() * (-gamma * (t - s)).exp(), 0.0, t, 4000);
            assert!((n - oracle).abs() <= 1e-9 * oracle, "γ = {gamma}, t = {t}: {n} vs {oracle}");
        }
    }
}

#[test]
fn balance_and_closed_form_split_at_first_order_in_loss() {
    let nu0 = 1.0;
    let t = 2.0;
    let gap = |gamma: f64| {
        let n = damped_growth_balance_ode(nu0, gamma, &[t], 1e-12).unwrap().samples[0].1;
        n - damped_growth(nu0, gamma, t)
    };
    let ratio = gap(1e-3) / gap(5e-4);
    assert!((ratio - 2.0).abs() < 1e-2, "{ratio}");
    let lossless = damped_growth_balance_ode(nu0, 0.0, &[1.0, 2.0, 3.0], 1e-12).unwrap();
    for &(t, n) in &lossless.samples {
        assert!((n / ideal_growth(nu0, t).photons - 1.0).abs() < 1e-9);
    }
}

#[test]
fn saturation_matches_tanh_solution() {
    // With γ = 0, dN/dt = ν0 sinh(2ν0t)(1 − ζN²) integrates to
    // N = tanh(√ζ sinh²(ν0t))/√ζ.
    let zeta: f64 = 1e-4;
    let params = DriveParams::resonant(1e-3, 1.0).unwrap().with_zeta(zeta).unwrap();
    let nu0 = resonant_rate(&params);
    let times: Vec<f64> = (1..=80).map(|i| 0.1 * i as f64 / nu0).collect();
    let sat = saturated_growth_at(&params, &times, 1e-12).unwrap();
    let s = zeta.sqrt();
    for &(t, n) in &sat.trace.samples {
        let oracle = (s * (nu0 * t).sinh().powi(2)).tanh() / s;
        assert!((n - oracle).abs() <= 1e-8 * oracle.max(1.0), "ν0t = {}: {n} vs {oracle}", nu0 * t);
        assert!(n <= 100.0 * (1.0 + 1e-9));
    }
    let level = sat.saturation_level.expect("plateau");
    assert!((level - 100.0).abs() <= 5.0, "{level}");
}

#[test]
fn saturation_with_losses_stays_below_bound() {
    let params = DriveParams::resonant(1e-3, 1.0)
        .unwrap()
        .with_zeta(1e-4)
        .unwrap()
        .with_gamma(1e-4)
        .unwrap();
    let nu0 = resonant_rate(&params);
    let sat = saturated_growth(&params, 8.0 / nu0, 1e-10).unwrap();
    assert_eq!(sat.bound, Some(100.0));
    assert!(sat.trace.samples.iter().all(|&(_, n)| (0.0..=100.0).contains(&n)));
}

#[test]
fn detuned_drive_is_suppressed() {
    let eps = 1e-3;
    let nu0 = resonant_rate(&DriveParams::resonant(eps, 1.0).unwrap());
    let t = 2.0 / nu0;
    let mode = unit_mode();
    let reference = ideal_growth(nu0, t).photons;
    for detuning in [-40.0, -20.0, 20.0, 40.0] {
        let omega = 2.0 + detuning * nu0;
        let p = CavityProfile::sinusoidal(TAU, eps * TAU, omega).unwrap();
        let opts = EvolveOptions {
            sampling: Sampling::Final,
            ..EvolveOptions::default()
        };
        let tr = evolve_with(&p, &mode, BogoliubovState::vacuum(0.0), t, &opts).unwrap();
        let n = photon_number(tr.last());
        assert!(n <= 0.1 * reference, "detuning {detuning}ν0: {n}");
    }
}

#[test]
fn scan_peaks_at_twice_the_mode_frequency() {
    let eps = 1e-3;
    let nu0 = resonant_rate(&DriveParams::resonant(eps, 1.0).unwrap());
    let grid = [1.90, 1.95, 2.00, 2.05, 2.10];
    let points = resonance_scan(&unit_mode(), eps, &grid, 1.0 / nu0, 1e-10).unwrap();
    assert_eq!(points.len(), grid.len());
    assert_eq!(scan_argmax(&points).unwrap().drive_frequency, 2.0);
    for p in points.iter().filter(|p| p.drive_frequency != 2.0) {
        assert!(p.photons < 1e-4, "{p:?}");
    }
    let serial = resonance_scan_with_workers(&unit_mode(), eps, &grid, 1.0 / nu0, 1e-10, 1).unwrap();
    assert_eq!(serial, points);
}

#[test]
fn unmodulated_scan_is_empty() {
    let points = resonance_scan(&unit_mode(), 0.0, &[1.5, 2.0, 2.5], 50.0, 1e-10).unwrap();
    assert!(points.iter().all(|p| p.photons == 0.0));
}

proptest! {
    #[test]
    fn resonant_coupling_equals_resonant_rate(eps in 0.0f64..0.5, w in 0.01f64..100.0) {
        let p = DriveParams::resonant(eps, w).unwrap();
        let nu = coupling_constant(0, &p).unwrap().value;
        let rate = resonant_rate(&p);
        prop_assert!((nu - rate).abs() <= 1e-14 * rate.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn damping_never_exceeds_ideal_growth(nu0 in 1e-4f64..1.0, gamma in 0.0f64..2.0, x in 0.0f64..30.0) {
        let t = x / nu0;
        let ideal = ideal_growth(nu0, t);
        prop_assert!(damped_growth(nu0, gamma, t) <= ideal.photons);
        prop_assert!(ideal.photons >= 0.0);
    }

    #[test]
    fn ideal_growth_is_nondecreasing(nu0 in 1e-4f64..1.0, a in 0.0f64..20.0, b in 0.0f64..20.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(ideal_growth(nu0, lo / nu0).photons <= ideal_growth(nu0, hi / nu0).photons);
    }

    #[test]
    fn saturated_growth_stays_below_ideal(
        zeta in 0.0f64..1e-2,
        gamma_rel in 0.0f64..0.5,
    ) {
        let params = DriveParams::resonant(1e-2, 1.0).unwrap();
        let nu0 = resonant_rate(&params);
        let params = params.with_zeta(zeta).unwrap().with_gamma(gamma_rel * nu0).unwrap();
        let times: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64 / nu0).collect();
        let sat = saturated_growth_at(&params, &times, 1e-10).unwrap();
        for &(t, n) in &sat.trace.samples {
            let ideal = ideal_growth(nu0, t).photons;
            prop_assert!(n >= 0.0);
            prop_assert!(n <= ideal * (1.0 + 1e-8), "t = {t}: {n} > {ideal}");
        }
    }
}
