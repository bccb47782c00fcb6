//! Acceptance suite. Runs every criterion at its stated replication count and
//! tolerance, prints one line per criterion and exits nonzero if any fails.

use std::time::Instant;

use empnull::least_favorable::{lower_bound_report, PairKind, PairOptions, SpaceParams, DECAY_NS, LOW_FREQ_TOL};
use empnull::sim::{
    mean_and_se, replication_rng, reproduce, run_setting, run_testing_setting, sample_mixture, testing_plan,
    Estimator, FdrReport, MixtureSpec, ReproduceTarget, SettingConfig, SettingId, TestingEstimator,
};
use empnull::{
    bh_stepup, evaluate_fdp_on, mean_functional, pvalues_from_null, sigma_functional, NullComponentCf,
    NullParams64,
};
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within_se(value: f64, se: f64, target: f64, k: f64) -> bool {
    (value - target).abs() <= k * se
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for u0 in [-1.0f64, -0.3, 0.4, 2.0] {
        for sigma0 in [0.5f64, 1.0, 1.5, 2.5] {
            for eps in [0.0, 0.1, 0.3] {
                let cf = NullComponentCf {
                    weight: 1.0 - eps,
                    u0,
                    sigma0,
                };
                for t in [0.25, 0.8, 1.5] {
                    let s2 = sigma_functional(&cf, t).expect("finite functional");
                    let m = mean_functional(&cf, t).expect("finite functional");
                    worst = worst.max((s2 - sigma0 * sigma0).abs()).max((m - u0).abs());
                }
            }
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max deviation {worst:.2e} over 144 cases (tol 1e-12)"),
    }
}

fn criterion_2() -> Outcome {
    let cfg = SettingConfig::paper(SettingId::S1, 20_240_001);
    let report = run_setting(&cfg).expect("setting 1 runs");
    let g = cfg.grid.iter().position(|&v| (v - 0.2).abs() < 1e-12).expect("γ = 0.20 on grid");
    let eps = report.row(Estimator::EpsCj, g).unwrap();
    let s2 = report.row(Estimator::Sigma0SqCj, g).unwrap();
    let u0 = report.series(Estimator::U0Cj);
    let eps_ok = within_se(eps.mse, eps.se, 4.14e-4, 3.0);
    let s2_ok = within_se(s2.mse, s2.se, 0.68e-4, 3.0);
    let mono = u0.windows(2).all(|w| w[1] > w[0]);
    Outcome {
        pass: eps_ok && s2_ok && mono,
        detail: format!(
            "eps MSE {:.3e} ± {:.1e} vs 4.14e-4 [{}]; sigma0² MSE {:.3e} ± {:.1e} vs 0.68e-4 [{}]; u0 MSE increasing [{}]",
            eps.mse,
            eps.se,
            ok(eps_ok),
            s2.mse,
            s2.se,
            ok(s2_ok),
            ok(mono)
        ),
    }
}

fn criterion_3() -> Outcome {
    let cfg = SettingConfig {
        grid: vec![2000.0, 5000.0, 10_000.0, 20_000.0],
        ..SettingConfig::paper(SettingId::S2, 20_240_002)
    };
    let report = run_setting(&cfg).expect("setting 2 runs");
    let mut pass = true;
    let mut parts = Vec::new();
    for (est, published) in [
        (Estimator::EpsCj, 43.9e-5),
        (Estimator::U0Cj, 60.5e-5),
        (Estimator::Sigma0SqCj, 7.1e-5),
    ] {
        let series = report.series(est);
        let decreasing = series.windows(2).all(|w| w[1] < w[0]);
        let row = report.row(est, 2).unwrap();
        let matched = within_se(row.mse, row.se, published, 3.0);
        pass &= decreasing && matched;
        parts.push(format!(
            "{est}: decreasing [{}], n=1e4 {:.3e} ± {:.1e} vs {published:.2e} [{}]",
            ok(decreasing),
            row.mse,
            row.se,
            ok(matched)
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_4() -> Outcome {
    let cfg = SettingConfig {
        replications: 200,
        ..SettingConfig::paper(SettingId::S3a, 20_240_003)
    };
    let report = run_setting(&cfg).expect("setting 3a runs");
    let cj = report.series(Estimator::EpsCj);
    let storey = report.series(Estimator::EpsStorey);
    let max = cj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = cj.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio_cj = max / min;
    let ratio_s = storey[storey.len() - 1] / storey[0];
    Outcome {
        pass: ratio_cj < 3.0 && ratio_s > 20.0,
        detail: format!("CJ max/min {ratio_cj:.2} (< 3); Storey eps=0.30 / eps=0.03 {ratio_s:.1} (> 20)"),
    }
}

fn testing_report(setting: SettingId, reps: usize, seed: u64) -> FdrReport {
    let cfg = SettingConfig {
        replications: reps,
        ..SettingConfig::paper(setting, seed)
    };
    let (procedure, estimators) = testing_plan(setting);
    run_testing_setting(&cfg, procedure, estimators).expect("testing setting runs")
}

fn criterion_5() -> Outcome {
    let report = testing_report(SettingId::S5a, 500, 20_240_005);
    let grid = report.config.grid.len();
    let mut within = true;
    let mut closer = 0;
    let mut worst: f64 = 0.0;
    for g in 0..grid {
        let dist = |e| (report.row(e, g).unwrap().fdr - 0.10).abs();
        let d_cj = dist(TestingEstimator::Cj);
        worst = worst.max(d_cj);
        within &= d_cj <= 0.02;
        if d_cj < dist(TestingEstimator::Storey) && d_cj < dist(TestingEstimator::Efron) {
            closer += 1;
        }
    }
    Outcome {
        pass: within && 2 * closer > grid,
        detail: format!(
            "max |FDR_CJ − 0.10| = {worst:.4} (≤ 0.02) [{}]; CJ closest at {closer}/{grid} points",
            ok(within)
        ),
    }
}

fn criterion_6() -> Outcome {
    let report = testing_report(SettingId::S5c, 300, 20_240_006);
    let mut pass = true;
    let mut ratios = Vec::new();
    for g in 0..report.config.grid.len() {
        let cj = report.row(TestingEstimator::Cj, g).unwrap().mse_fdp;
        let ef = report.row(TestingEstimator::Efron, g).unwrap().mse_fdp;
        pass &= cj <= ef;
        ratios.push(format!("{:.2}", ef / cj));
    }
    Outcome {
        pass,
        detail: format!("MSE(FDP) Efron/CJ across sigma0 grid: [{}]", ratios.join(", ")),
    }
}

fn criterion_7() -> Outcome {
    const NAMES: [&str; 7] = [
        "w1_integral",
        "h_first_nonnegative",
        "h_second_nonnegative",
        "h_first_mass",
        "h_second_mass",
        "low_frequency_match",
        "w1_tail",
    ];
    let params = SpaceParams::standard(10_000);
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in PairKind::ALL {
        let report = lower_bound_report(kind, &params, PairOptions::default(), LOW_FREQ_TOL, &DECAY_NS)
            .expect("lower-bound pair builds");
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| NAMES.contains(&c.name.as_str()) || c.name == "n_chi2_decreasing")
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {:.3e}", c.name, c.value))
            .collect();
        pass &= failed.is_empty();
        parts.push(if failed.is_empty() {
            format!("{kind}: ok")
        } else {
            format!("{kind}: failed {}", failed.join(", "))
        });
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_8() -> Outcome {
    let spec = MixtureSpec::gaussian(0.0, NullParams64::standard(), 1.0).unwrap();
    let fdps: Vec<f64> = (0..1000u32)
        .into_par_iter()
        .map(|r| {
            let s = sample_mixture(&spec, 10_000, &mut replication_rng(20_240_008, 0, r)).unwrap();
            let p = pvalues_from_null(&s, &NullParams64::standard());
            evaluate_fdp_on(&bh_stepup(&p, 0.10).unwrap(), &s).unwrap()
        })
        .collect();
    let (fdr, se) = mean_and_se(&fdps);
    Outcome {
        pass: fdr <= 0.10 + 3.0 * se,
        detail: format!("FDR {fdr:.4} ± {se:.4} over 1000 reps (≤ 0.10 + 3 SE)"),
    }
}

fn criterion_9() -> Outcome {
    let dir = std::env::temp_dir().join(format!("empnull-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let mut mismatched = Vec::new();
    for target in ReproduceTarget::ALL {
        let mut bytes = Vec::new();
        for run in 0..2 {
            let out = reproduce(target, 7, 0.002).expect("reproduce runs");
            let csv = dir.join(format!("{target}-{run}.csv"));
            let json = dir.join(format!("{target}-{run}.json"));
            std::fs::write(&csv, &out.csv).unwrap();
            std::fs::write(&json, &out.json).unwrap();
            bytes.push((std::fs::read(&csv).unwrap(), std::fs::read(&json).unwrap()));
        }
        if bytes[0] != bytes[1] {
            mismatched.push(target.to_string());
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Outcome {
        pass: mismatched.is_empty(),
        detail: if mismatched.is_empty() {
            format!("{} targets byte-identical across reruns", ReproduceTarget::ALL.len())
        } else {
            format!("differing outputs: {}", mismatched.join(", "))
        },
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "miss"
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 functional identities", criterion_1),
        ("2 setting 1 gamma sweep", criterion_2),
        ("3 setting 2 sample-size scaling", criterion_3),
        ("4 setting 3a robustness", criterion_4),
        ("5 setting 5a adaptive BH", criterion_5),
        ("6 setting 5c AdaptZ", criterion_6),
        ("7 least-favorable pairs", criterion_7),
        ("8 pure-null BH", criterion_8),
        ("9 reproduce determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {} ({:.1}s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
