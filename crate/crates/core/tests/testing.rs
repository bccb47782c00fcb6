use empnull::kde::{default_loo_grid, select_loo_bandwidth};
use empnull::{
    adaptive_bh, adaptz, adaptz_from_lfdr, bh_stepup, evaluate_fdp, evaluate_fdp_on, kde, kde_with_bandwidth,
    lfdr_values, normal_pdf, BandwidthRule, DensityEstimate64, Error, NullParams64, PValues64,
    ProportionEstimate64, RejectionSet, Sample64, TestingOutcome,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn normal_sample(n: usize, seed: u64) -> Sample64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Sample64::new((0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
}

fn flags(r: &RejectionSet) -> Vec<bool> {
    r.rejected().to_vec()
}

#[test]
fn bh_hand_examples() {
    let p = PValues64::new(vec![0.01, 0.04, 0.03, 0.2, 0.5]).unwrap();
    let r = bh_stepup(&p, 0.1).unwrap();
    assert_eq!(flags(&r), [true, true, true, false, false]);
    assert_eq!(r.count(), 3);

    // Step-up: the third p-value passes although the first two fail their own cut.
    let p = PValues64::new(vec![0.9, 0.02, 0.03, 0.035]).unwrap();
    assert_eq!(flags(&bh_stepup(&p, 0.05).unwrap()), [false, true, true, true]);

    let p = PValues64::new(vec![0.3, 0.6]).unwrap();
    assert_eq!(bh_stepup(&p, 0.05).unwrap().count(), 0);
}

/// `k* = max{k : #{p ≤ kα/n} ≥ k}`; rejects `p ≤ k*α/n`.
fn bh_oracle(p: &[f64], level: f64) -> Vec<bool> {
    let n = p.len();
    let mut k_star = 0;
    for k in 1..=n {
        let cut = k as f64 * level / n as f64;
        if p.iter().filter(|&&v| v <= cut).count() >= k {
            k_star = k;
        }
    }
    let cut = k_star as f64 * level / n as f64;
    p.iter().map(|&v| k_star > 0 && v <= cut).collect()
}

proptest! {
    #[test]
    fn bh_matches_counting_oracle(p in prop::collection::vec(0.0f64..=1.0, 1..80), alpha in 0.01f64..0.5) {
        let r = bh_stepup(&PValues64::new(p.clone()).unwrap(), alpha).unwrap();
        prop_assert_eq!(flags(&r), bh_oracle(&p, alpha));
    }

    #[test]
    fn bh_is_monotone_in_alpha(p in prop::collection::vec(0.0f64..=1.0, 1..80), a in 0.01f64..0.5, b in 0.01f64..0.5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let pv = PValues64::new(p).unwrap();
        let small = bh_stepup(&pv, lo).unwrap();
        let large = bh_stepup(&pv, hi).unwrap();
        for (s, l) in small.rejected().iter().zip(large.rejected()) {
            prop_assert!(!s || *l);
        }
    }

    #[test]
    fn bh_commutes_with_permutation(p in prop::collection::vec(0.0f64..=1.0, 1..60), alpha in 0.01f64..0.5) {
        let mut rev = p.clone();
        rev.reverse();
        let a = flags(&bh_stepup(&PValues64::new(p).unwrap(), alpha).unwrap());
        let mut b = flags(&bh_stepup(&PValues64::new(rev).unwrap(), alpha).unwrap());
        b.reverse();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn adaptive_bh_is_bh_at_the_inflated_level(
        p in prop::collection::vec(0.0f64..=1.0, 1..60),
        alpha in 0.01f64..0.2,
        eps in 0.0f64..0.8,
    ) {
        let pv = PValues64::new(p.clone()).unwrap();
        let r = adaptive_bh(&pv, alpha, &ProportionEstimate64::known(eps)).unwrap();
        prop_assert_eq!(flags(&r), bh_oracle(&p, alpha / (1.0 - eps)));
    }

    #[test]
    fn fdp_matches_direct_count(pairs in prop::collection::vec((prop::bool::ANY, prop::bool::ANY), 0..100)) {
        let rej: Vec<bool> = pairs.iter().map(|p| p.0).collect();
        let truth: Vec<bool> = pairs.iter().map(|p| p.1).collect();
        let mut false_rej = 0;
        let mut total = 0;
        for (r, t) in &pairs {
            if *r {
                total += 1;
                if !*t {
                    false_rej += 1;
                }
            }
        }
        let want = if total == 0 { 0.0 } else { false_rej as f64 / total as f64 };
        let got = evaluate_fdp(&RejectionSet::from_flags(rej), &truth).unwrap();
        prop_assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn adaptive_bh_edge_cases() {
    let p = PValues64::new(vec![0.01, 0.2, 0.6, 0.99]).unwrap();
    let plain = bh_stepup(&p, 0.1).unwrap();
    assert_eq!(adaptive_bh(&p, 0.1, &ProportionEstimate64::known(0.0)).unwrap(), plain);
    // Negative raw estimates are clamped to 0 first.
    let neg = ProportionEstimate64::from_raw(-0.4, None, None);
    assert_eq!(adaptive_bh(&p, 0.1, &neg).unwrap(), plain);
    // A level above 1 rejects everything.
    let all = adaptive_bh(&p, 0.2, &ProportionEstimate64::known(0.9)).unwrap();
    assert_eq!(all.count(), 4);
    assert!(matches!(
        adaptive_bh(&p, 0.1, &ProportionEstimate64::known(1.0)),
        Err(Error::LevelOverflow { .. })
    ));
    assert!(bh_stepup(&p, 1.0).is_err());
}

#[test]
fn adaptz_hand_examples() {
    let r = adaptz_from_lfdr(&[0.01, 0.5, 0.02, 0.3, 0.9], 0.1);
    assert_eq!(flags(&r), [true, false, true, false, false]);
    // Ties with the k*-th value are rejected together.
    let r = adaptz_from_lfdr(&[0.2, 0.02, 0.2], 0.12);
    assert_eq!(flags(&r), [true, true, true]);
    let r = adaptz_from_lfdr(&[0.5, 0.6], 0.1);
    assert_eq!(r.count(), 0);
}

#[test]
fn lfdr_matches_direct_formula() {
    let s = normal_sample(200, 3);
    let f: DensityEstimate64 = kde(&s, &BandwidthRule::Fixed(0.4)).unwrap();
    let null = NullParams64::new(0.1, 1.1).unwrap();
    let eps = ProportionEstimate64::known(0.2);
    let lfdr = lfdr_values(&s, &eps, &null, &f).unwrap();
    for (&x, &l) in s.values().iter().zip(&lfdr) {
        let want = (0.8 * normal_pdf((x - 0.1) / 1.1) / 1.1 / f.eval_exact(x)).min(1.0);
        assert!((l - want).abs() < 1e-14);
    }
    // A proportion of 1 floors the null fraction.
    let lfdr = lfdr_values(&s, &ProportionEstimate64::known(1.0), &null, &f).unwrap();
    assert!(lfdr.iter().all(|&l| l > 0.0 && l < 1e-5));
    // A too-narrow null density is capped at 1.
    let lfdr = lfdr_values(&s, &ProportionEstimate64::known(0.0), &NullParams64::new(0.0, 0.05).unwrap(), &f);
    assert!(lfdr.unwrap().contains(&1.0));
}

#[test]
fn adaptz_on_well_separated_data() {
    let mut v: Vec<f64> = normal_sample(900, 4).values().to_vec();
    v.extend(normal_sample(100, 5).values().iter().map(|x| x + 6.0));
    let truth: Vec<bool> = (0..1000).map(|i| i >= 900).collect();
    let s = Sample64::with_truth(v, truth).unwrap();
    let f = kde(&s, &BandwidthRule::Silverman).unwrap();
    let r = adaptz(&s, 0.1, &ProportionEstimate64::known(0.1), &NullParams64::standard(), &f).unwrap();
    assert!(r.count() > 80);
    let fdp = evaluate_fdp_on(&r, &s).unwrap();
    // Only the expected FDP is controlled; one realization can exceed α.
    assert!(fdp < 0.2, "{fdp} with {} rejections", r.count());
    let out = TestingOutcome::new(r, s.truth(), 0.1).unwrap();
    assert_eq!(out.fdp, Some(fdp));
}

#[test]
fn fdp_errors() {
    let r = RejectionSet::from_flags(vec![true, false]);
    assert!(evaluate_fdp(&r, &[true]).is_err());
    assert!(evaluate_fdp_on(&r, &Sample64::new(vec![0.0, 1.0]).unwrap()).is_err());
    assert_eq!(evaluate_fdp(&RejectionSet::from_flags(vec![false; 3]), &[false; 3]).unwrap(), 0.0);
}

#[test]
fn kde_two_point_example() {
    let s = Sample64::new(vec![-1.0, 1.0]).unwrap();
    let f = kde_with_bandwidth(&s, 1.0).unwrap();
    assert!((f.eval(0.0) - normal_pdf(1.0)).abs() < 1e-16);
    assert_eq!(f.bandwidth(), 1.0);
}

#[test]
fn silverman_bandwidth() {
    let s = normal_sample(100_000, 6);
    let mut v = s.values().to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let q = |p: f64| {
        let pos = p * (n - 1.0);
        let k = pos.floor() as usize;
        v[k] + (pos - k as f64) * (v[k + 1] - v[k])
    };
    let want = 0.9 * sd.min((q(0.75) - q(0.25)) / 1.34) * n.powf(-0.2);
    let f = kde(&s, &BandwidthRule::Silverman).unwrap();
    assert!((f.bandwidth() - want).abs() < 1e-12);
    assert!((f.bandwidth() - 0.09).abs() < 0.005);
}

#[test]
fn binned_density_tracks_exact_sum() {
    let s = normal_sample(5_000, 7);
    let f = kde(&s, &BandwidthRule::Silverman).unwrap();
    for x in [-3.0, -1.2, 0.0, 0.4, 2.5] {
        let (a, b) = (f.eval(x), f.eval_exact(x));
        assert!((a - b).abs() < 1e-3 * b, "{x}: {a} vs {b}");
    }
    // Far outside the grid the exact sum is used.
    assert_eq!(f.eval(50.0), f.eval_exact(50.0));
}

#[test]
fn density_integrates_to_one() {
    let s = normal_sample(500, 8);
    let f = kde(&s, &BandwidthRule::Fixed(0.3)).unwrap();
    let (a, b, m) = (-8.0, 8.0, 16_000);
    let h = (b - a) / m as f64;
    let mass: f64 = (0..m).map(|i| f.eval(a + (i as f64 + 0.5) * h)).sum::<f64>() * h;
    assert!((mass - 1.0).abs() < 1e-8);
}

#[test]
fn loo_selects_an_interior_bandwidth() {
    let s = normal_sample(2_000, 9);
    let h_ref = kde(&s, &BandwidthRule::Silverman).unwrap().bandwidth();
    let grid = default_loo_grid(h_ref);
    assert_eq!(grid.len(), 20);
    assert!((grid[0] - 0.1 * h_ref).abs() < 1e-15 && (grid[19] - 3.0 * h_ref).abs() < 1e-14);
    let h = select_loo_bandwidth(&s, &grid).unwrap();
    assert!(h > grid[0] && h < grid[19]);
    assert_eq!(kde(&s, &BandwidthRule::LooCvDefault).unwrap().bandwidth(), h);
    assert_eq!(kde(&s, &BandwidthRule::LooCv(grid)).unwrap().bandwidth(), h);
}

#[test]
fn kde_errors() {
    let short = normal_sample(9, 1);
    assert!(matches!(kde(&short, &BandwidthRule::Silverman), Err(Error::InvalidInput(_))));
    let flat = Sample64::new(vec![2.0; 20]).unwrap();
    assert!(matches!(kde(&flat, &BandwidthRule::Silverman), Err(Error::DegenerateSample(_))));
    let s = normal_sample(50, 2);
    assert!(kde(&s, &BandwidthRule::Fixed(0.0)).is_err());
    assert!(kde(&s, &BandwidthRule::LooCv(vec![])).is_err());
    assert!(kde_with_bandwidth(&s, -1.0).is_err());
}
