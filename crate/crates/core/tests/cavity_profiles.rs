use std::f64::consts::TAU;

use dcesim_core::cavity::{
    dielectric_to_length, mode_frequency, CavityProfile, IndexPerturbation, Knot, ModeSpec, RefractiveTrace,
};
use dcesim_core::Error;
use proptest::prelude::*;

fn centred_difference(p: &CavityProfile, t: f64, h: f64) -> f64 {
    (p.length_at(t + h).unwrap() - p.length_at(t - h).unwrap()) / (2.0 * h)
}

#[test]
fn length_rate_converges_quadratically() {
    let p = CavityProfile::sinusoidal(1.0, 0.1, 3.0).unwrap();
    for &t in &[0.3, 1.1, 2.7, 4.0] {
        let exact = p.length_rate(t).unwrap();
        let h = 1e-2;
        let e1 = (centred_difference(&p, t, h) - exact).abs();
        let e2 = (centred_difference(&p, t, h / 2.0) - exact).abs();
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.05, "t = {t}: observed order {order}");
    }
}

#[test]
fn piecewise_linear_slope_is_right_handed_at_knots() {
    let p = CavityProfile::piecewise_linear(vec![
        Knot { t: 0.0, length: 1.0 },
        Knot { t: 1.0, length: 2.0 },
        Knot { t: 3.0, length: 1.0 },
    ])
    .unwrap();
    assert_eq!(p.length_rate(0.5).unwrap(), 1.0);
    assert_eq!(p.length_rate(1.0).unwrap(), -0.5);
    assert_eq!(p.length_rate(3.0).unwrap(), -0.5);
    assert!(matches!(p.length_at(3.5), Err(Error::OutsideDomain { .. })));
}

#[test]
fn step_profile_is_not_differentiable_at_the_jump() {
    let p = CavityProfile::step(1.0, 2.0, 0.5).unwrap();
    assert!(matches!(p.length_rate(0.5), Err(Error::NotDifferentiable { .. })));
    assert_eq!(p.length_rate(0.25).unwrap(), 0.0);
    assert_eq!(p.length_at(0.5).unwrap(), 2.0);
}

#[test]
fn invalid_profiles_are_rejected() {
    assert!(CavityProfile::constant(0.0).is_err());
    assert!(CavityProfile::sinusoidal(1.0, 1.0, 2.0).is_err());
    assert!(CavityProfile::step(1.0, -1.0, 0.0).is_err());
    assert!(CavityProfile::piecewise_linear(vec![Knot { t: 0.0, length: 1.0 }]).is_err());
    assert!(CavityProfile::piecewise_linear(vec![Knot { t: 1.0, length: 1.0 }, Knot { t: 1.0, length: 2.0 }]).is_err());
    assert!(ModeSpec::new(0, 1.0, 1.0).is_err());
}

#[test]
fn constant_profile_frequency() {
    let p = CavityProfile::constant(TAU).unwrap();
    let mode = ModeSpec::for_profile(3, &p).unwrap();
    assert!((mode_frequency(&p, &mode, 17.0).unwrap() - 3.0).abs() < 1e-15);
    assert!((mode.frequency() - 3.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn frequency_times_length_is_constant(
        base in 0.1f64..10.0,
        depth in 0.0f64..0.9,
        drive in 0.01f64..10.0,
        m in 1u32..20,
        t in 0.0f64..100.0,
    ) {
        let p = CavityProfile::sinusoidal(base, depth * base, drive).unwrap();
        let mode = ModeSpec::for_profile(m, &p).unwrap();
        let product = mode_frequency(&p, &mode, t).unwrap() * p.length_at(t).unwrap();
        let expected = TAU * m as f64;
        prop_assert!((product - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn dielectric_map_matches_index_for_unit_background(
        amplitude in 0.0f64..0.5,
        frequency in 0.1f64..5.0,
        base in 0.5f64..5.0,
        t in 0.0f64..20.0,
    ) {
        let trace = RefractiveTrace::new(1.0, IndexPerturbation::Sinusoidal { amplitude, frequency }).unwrap();
        let p = dielectric_to_length(&trace, base).unwrap();
        let mode = ModeSpec::for_profile(1, &p).unwrap();
        let n = 1.0 + amplitude * (frequency * t).sin();
        let expected = TAU / (base * n);
        let got = mode_frequency(&p, &mode, t).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn jumps_and_breakpoints_stay_in_window(at in -5.0f64..5.0, t0 in -5.0f64..0.0, span in 0.0f64..5.0) {
        let p = CavityProfile::step(1.0, 1.5, at).unwrap();
        let t1 = t0 + span;
        let jumps = p.jumps(t0, t1);
        prop_assert_eq!(jumps.len(), usize::from(at >= t0 && at <= t1));
        for b in p.breakpoints(t0, t1) {
            prop_assert!(b > t0 && b < t1);
        }
    }
}
