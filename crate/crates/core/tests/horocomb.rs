use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use approx::assert_relative_eq;
use horocomb_core::horocomb::*;
use horocomb_core::invariants::{equivalent_models, model_arg, ParamVerdict};
use horocomb_core::rational::{rationalize, Rational};
use horocomb_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn mix_weight_examples() {
    let (p, q) = mix_weights_for_target(0.0, FRAC_PI_2, FRAC_PI_4).unwrap();
    assert_relative_eq!(p, 0.5, epsilon = 1e-15);
    assert_relative_eq!(q, 0.5, epsilon = 1e-15);
    assert_eq!(mix_weights_for_target(0.0, 1.0, 0.0).unwrap(), (1.0, 0.0));
    let (p, q) = mix_weights_for_target(0.0, 1.0, 1.0).unwrap();
    assert!(p.abs() < 1e-15 && (q - 1.0).abs() < 1e-15);
    // sin(1 - 0.25) / (sin(0.75) + sin(0.25))
    let (p, _) = mix_weights_for_target(0.0, 1.0, 0.25).unwrap();
    assert_relative_eq!(p, 0.75f64.sin() / (0.75f64.sin() + 0.25f64.sin()), epsilon = 1e-15);
    assert!(mix_weights_for_target(0.0, 1.0, 1.5).is_err());
}

#[test]
fn endpoints() {
    let real = endpoint_real(1.5).unwrap();
    assert_eq!(real.k1(), Complex64::new(-1.0, 0.0));
    assert!(endpoint_real(2.0).is_err());
    let taut = endpoint_tautological(0.5).unwrap();
    assert_relative_eq!(model_arg(&taut), FRAC_PI_4, epsilon = 1e-15);
    let id = endpoint_tautological(1.0).unwrap();
    assert_eq!(id.k1(), Complex64::new(0.0, 1.0));
    assert!(endpoint_tautological(1.2).is_err());
}

#[test]
fn make_representation_reports_verdicts() {
    let m = make_representation(0.5, 0.0).unwrap();
    assert_relative_eq!(m.k1().re, -1.0);
    assert_relative_eq!(m.k1().im, 0.0);
    match make_representation(1.0, FRAC_PI_2) {
        Err(Error::NotConstructible { verdict, .. }) => assert_eq!(verdict, ParamVerdict::Boundary),
        other => panic!("unexpected {other:?}"),
    }
    match make_representation(0.5, 1.0) {
        Err(Error::NotConstructible { verdict, .. }) => assert_eq!(verdict, ParamVerdict::Unknown),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn combination_spec_validation() {
    let a = make_representation(0.5, 0.0).unwrap();
    let b = make_representation(0.5, 0.5).unwrap();
    let c = make_representation(0.6, 0.5).unwrap();
    assert!(CombinationSpec::new(a, c, Weights::Interpolate(0.5)).is_err());
    assert!(CombinationSpec::new(a, b, Weights::Interpolate(1.5)).is_err());
    assert!(CombinationSpec::new(a, b, Weights::Explicit { p: 0.0, q: 0.0 }).is_err());
    assert!(CombinationSpec::new(a, b, Weights::Explicit { p: -1.0, q: 2.0 }).is_err());
    let spec = CombinationSpec::new(a, b, Weights::Explicit { p: 2.0, q: 0.0 }).unwrap();
    assert!(equivalent_models(&combine_models(&spec).unwrap(), &a));
}

#[test]
fn combination_is_affine_in_the_angular_invariant() {
    let t = 0.5;
    let a = make_representation(t, 0.0).unwrap();
    let b = make_representation(t, t * FRAC_PI_2).unwrap();
    for u in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let spec = CombinationSpec::new(a, b, Weights::Interpolate(u)).unwrap();
        let got = model_arg(&combine_models(&spec).unwrap());
        assert!((got - u * t * FRAC_PI_2).abs() <= 1e-12, "u = {u}");
    }
}

#[test]
fn combined_construction_matches_direct() {
    for (t, r) in [(0.3, 0.1), (0.5, 0.3), (0.9, 1.0), (1.0, 1.2), (0.7, 0.0)] {
        let direct = make_representation(t, r).unwrap();
        let combined = make_representation_by_combination(t, r).unwrap();
        assert!(equivalent_models(&direct, &combined), "({t}, {r})");
    }
}

#[test]
fn direct_sum_gram_equals_k_sum_gram() {
    let t = 0.5;
    let real = endpoint_real(t).unwrap();
    let taut = endpoint_tautological(t).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let params: Vec<Rational> = (0..20)
        .map(|_| rationalize(rng.random_range(0.01..2.0) * if rng.random() { 1.0 } else { -1.0 }, 16))
        .collect();
    let (p, q) = (0.3, 1.7);
    let a = direct_sum_gram(&real, &taut, p, q, &params);
    let b = k_sum_gram(&real, &taut, p, q, &params).unwrap();
    assert!((a - b).camax() < 1e-12);
}

proptest! {
    #[test]
    fn combinations_stay_between_their_parts(t in 0.05..1.0f64, x in 0.0..1.0f64, y in 0.0..1.0f64, u in 0.0..1.0f64) {
        let (r1, r2) = (x * t * FRAC_PI_2, y * t * FRAC_PI_2);
        let a = make_representation(t, r1).unwrap();
        let b = make_representation(t, r2).unwrap();
        let spec = CombinationSpec::new(a, b, Weights::Interpolate(u)).unwrap();
        let m = combine_models(&spec).unwrap();
        prop_assert!((model_arg(&m) - ((1.0 - u) * r1 + u * r2)).abs() < 1e-12);
        prop_assert!((m.t() - t).abs() < 1e-15);
        let (p, q) = spec.resolved_weights().unwrap();
        prop_assert!(p >= 0.0 && q >= 0.0 && (p + q - 1.0).abs() < 1e-15);
    }
}
