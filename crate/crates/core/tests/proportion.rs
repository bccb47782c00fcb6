use empnull::{
    estimate_eps_known_null, estimate_eps_plugin, estimate_eps_plugin_detailed, estimate_eps_with_null,
    estimate_null, phase_function_estimator, point_mass_frequency, NullParams64, ProportionEstimate64,
    Sample64, WeightDensity,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn normal_sample(n: usize, seed: u64) -> Sample64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sample64::new((0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
}

#[test]
fn single_observation_gives_zero() {
    let s = Sample64::new(vec![1.7]).unwrap();
    let e = estimate_eps_known_null(&s, 0.2).unwrap();
    assert_eq!(e.raw, 0.0);
    assert_eq!(e.t_used, Some(0.0));
}

#[test]
fn ten_points_match_direct_sum() {
    let xs = [-1.3, 0.2, 0.9, 2.4, -0.4, 0.0, 3.1, -2.2, 0.75, 1.05];
    let s = Sample64::new(xs.to_vec()).unwrap();
    let gamma = 0.3;
    let t = (2.0 * gamma * 10f64.ln()).sqrt();
    let mut sum = 0.0;
    for x in xs {
        sum += (t * x).cos();
    }
    let want = 1.0 - 10f64.powf(gamma - 1.0) * sum;
    let got = estimate_eps_known_null(&s, gamma).unwrap();
    assert!((got.raw - want).abs() < 1e-14, "{} vs {want}", got.raw);
    assert!((got.t_used.unwrap() - t).abs() < 1e-15);
    assert_eq!(got.gamma, Some(gamma));
}

#[test]
fn constant_zero_sample() {
    let s = Sample64::new(vec![0.0; 100]).unwrap();
    let e = estimate_eps_known_null(&s, 0.2).unwrap();
    assert!((e.raw - (1.0 - 100f64.powf(0.2))).abs() < 1e-13);
    assert_eq!(e.clamped, 0.0);
}

#[test]
fn point_mass_frequency_values() {
    assert!((point_mass_frequency(10_000, 0.2) - (0.4 * 1e4f64.ln()).sqrt()).abs() < 1e-15);
    assert_eq!(point_mass_frequency(1, 0.2), 0.0);
}

#[test]
fn standard_null_is_the_known_null_estimator() {
    let s = normal_sample(1_000, 3);
    let a = estimate_eps_known_null(&s, 0.2).unwrap();
    let b = estimate_eps_with_null(&s, 0.2, &NullParams64::standard()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn plugin_uses_the_estimated_null() {
    let s = normal_sample(5_000, 4);
    let null = estimate_null(&s, 0.2).unwrap();
    let injected = estimate_eps_with_null(&s, 0.2, &null).unwrap();
    let plugin = estimate_eps_plugin(&s, 0.2).unwrap();
    assert_eq!(injected, plugin);
    let (detail, p) = estimate_eps_plugin_detailed(&s, 0.2).unwrap();
    assert_eq!(detail.params, null);
    assert_eq!(p, plugin);
}

#[test]
fn pure_null_estimates_are_small() {
    let s = normal_sample(100_000, 6);
    let known = estimate_eps_known_null(&s, 0.2).unwrap();
    assert!(known.raw.abs() < 0.05, "{known:?}");
    let plugin = estimate_eps_plugin(&s, 0.2).unwrap();
    assert!(plugin.raw.abs() < 0.1, "{plugin:?}");
}

proptest! {
    #[test]
    fn clamped_value_is_the_clamped_raw(raw in -5.0f64..5.0) {
        let e = ProportionEstimate64::from_raw(raw, None, None);
        prop_assert_eq!(e.clamped, raw.clamp(0.0, 1.0));
    }

    #[test]
    fn known_null_estimator_is_affine_equivariant(
        xs in prop::collection::vec(-4.0f64..4.0, 2..50),
        a in 0.5f64..3.0,
        b in -2.0f64..2.0,
    ) {
        let s = Sample64::new(xs.clone()).unwrap();
        let moved = Sample64::new(xs.iter().map(|x| a * x + b).collect()).unwrap();
        let e = estimate_eps_known_null(&s, 0.2).unwrap();
        let f = estimate_eps_with_null(&moved, 0.2, &NullParams64::new(b, a).unwrap()).unwrap();
        prop_assert!((e.raw - f.raw).abs() < 1e-11);
    }

    #[test]
    fn known_null_estimator_is_bounded(xs in prop::collection::vec(-10.0f64..10.0, 1..80)) {
        let n = xs.len() as f64;
        let e = estimate_eps_known_null(&Sample64::new(xs).unwrap(), 0.2).unwrap();
        prop_assert!(e.raw >= 1.0 - n.powf(0.2) - 1e-12);
        prop_assert!(e.raw <= 1.0 + n.powf(0.2) + 1e-12);
    }
}

/// Midpoint rule; the densities vanish at the open endpoints.
fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    (0..m).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

#[test]
fn weight_densities_are_normalized() {
    for w in [WeightDensity::Uniform, WeightDensity::Triangle, WeightDensity::Smooth] {
        let mass = midpoint(|x| w.eval(x), -1.0, 1.0, 200_000);
        assert!((mass - 1.0).abs() < 1e-8, "{w:?}: {mass}");
        assert_eq!(w.eval(1.0), 0.0);
        assert_eq!(w.eval(-1.2), 0.0);
    }
    // ∫₋₁¹ exp(−1/(1 − ξ²)) dξ to 20 digits.
    let z = 0.44399381616807943782;
    assert!((WeightDensity::Smooth.eval(0.0) - (-1f64).exp() / z).abs() < 1e-12);
}

#[test]
fn phase_function_on_zeros_is_negative() {
    let s = Sample64::new(vec![0.0; 200]).unwrap();
    for w in [WeightDensity::Uniform, WeightDensity::Triangle, WeightDensity::Smooth] {
        let e = phase_function_estimator(&s, 0.2, w).unwrap();
        assert!(e.raw < 0.0);
        assert_eq!(e.clamped, 0.0);
    }
}

#[test]
fn phase_function_matches_trapezoid_oracle() {
    let s = normal_sample(300, 7);
    let gamma = 0.25;
    let n = s.len() as f64;
    let t = (2.0 * gamma * n.ln()).sqrt();
    let integrand = |xi: f64| {
        let u = t * xi;
        let mean_cos = s.values().iter().map(|x| (u * x).cos()).sum::<f64>() / n;
        (1.0 - xi.abs()) * (0.5 * u * u).exp() * mean_cos
    };
    // Trapezoid on each side of the kink at 0.
    let m = 10_000;
    let h = 1.0 / m as f64;
    let mut half = 0.5 * (integrand(0.0) + integrand(1.0));
    for i in 1..m {
        half += integrand(i as f64 * h);
    }
    half *= h;
    let want = 1.0 - 2.0 * half;
    let got = phase_function_estimator(&s, gamma, WeightDensity::Triangle).unwrap();
    assert!((got.raw - want).abs() < 1e-7, "{} vs {want}", got.raw);
}

#[test]
fn phase_function_on_pure_null_is_small() {
    let s = normal_sample(100_000, 8);
    for w in [WeightDensity::Uniform, WeightDensity::Triangle, WeightDensity::Smooth] {
        let e = phase_function_estimator(&s, 0.2, w).unwrap();
        assert!(e.raw.abs() < 0.05, "{w:?}: {e:?}");
    }
}

#[test]
fn proportion_errors() {
    let s = normal_sample(10, 1);
    assert!(estimate_eps_known_null(&s, 0.0).is_err());
    assert!(estimate_eps_known_null(&s, 0.5).is_err());
    assert!(phase_function_estimator(&s, 0.7, WeightDensity::Uniform).is_err());
}
