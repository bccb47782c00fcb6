use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quadrature::trapezoid;

use super::pair::{build_pair, DensityPair, PairKind, PairOptions, NONNEG_TOL};
use super::params::SpaceParams;
use super::transform::forward_transform;

pub const LOW_FREQ_TOL: f64 = 1e-8;
pub const MASS_TOL: f64 = 1e-6;
pub const ROUNDTRIP_TOL: f64 = 1e-6;
pub const W1_ZERO_TOL: f64 = 1e-8;
/// Allowed range of `|u|^k w₁(u)` on the outer decade.
pub const TAIL_BAND: (f64, f64) = (0.8, 1.2);
/// Expected log-log slope of `||u|^k w₂(u) − 1|` and its tolerance.
pub const TAIL_SLOPE: (f64, f64) = (-1.0, 0.3);
/// Bound on `n·χ²` at the configured `n`.
pub const N_CHI2_BOUND: f64 = 0.5;
pub const ROUNDTRIP_FREQS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.0];
pub const DECAY_NS: [u64; 3] = [1_000, 10_000, 100_000];

/// One named verification result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
            detail: None,
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

/// `∫ (f_second − f_first)² / f_first` over the density window.
pub fn chi2_distance(pair: &DensityPair) -> Result<f64> {
    Ok(chi2_details(pair)?.value)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chi2Report {
    pub value: f64,
    /// `∫ D²` inside the window.
    pub window_l2: f64,
    /// `∫ D²` outside the window, by Parseval.
    pub outside_l2: f64,
    /// `outside_l2 / min f_first` on the window edge, a rough size for the
    /// omitted tail.
    pub tail_estimate: f64,
}

pub fn chi2_details(pair: &DensityPair) -> Result<Chi2Report> {
    for (i, &f) in pair.f_first.iter().enumerate() {
        if !(f > 0.0) {
            return Err(Error::Support {
                x: pair.x[i],
                value: f,
            });
        }
    }
    let step = pair.x_step();
    let ratio: Vec<f64> = pair
        .diff
        .iter()
        .zip(&pair.f_first)
        .map(|(d, f)| d * d / f)
        .collect();
    let sq: Vec<f64> = pair.diff.iter().map(|d| d * d).collect();
    let window_l2 = trapezoid(&sq, step);
    let outside_l2 = (pair.diff_l2_total - window_l2).max(0.0);
    let edge = pair.f_first[0].min(pair.f_first[pair.f_first.len() - 1]);
    Ok(Chi2Report {
        value: trapezoid(&ratio, step),
        window_l2,
        outside_l2,
        tail_estimate: outside_l2 / edge,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowFreqReport {
    pub max_abs_diff: f64,
    /// `max_abs_diff / max|f̂_first|`.
    pub relative: f64,
    /// Frequency of the largest difference.
    pub location: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Largest `|f̂_first − f̂_second|` over `|t| ≤ τₙ`, relative to `max|f̂_first|`.
pub fn verify_low_freq_match(pair: &DensityPair, tol: f64) -> Result<LowFreqReport> {
    if pair.freq.is_empty() {
        return Err(invalid("pair has no frequency tabulation"));
    }
    let scale = pair.f_hat_first.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (mut worst, mut at) = (0.0, 0.0);
    for (i, &t) in pair.freq.iter().enumerate() {
        if t.abs() > pair.tau {
            continue;
        }
        let d = (pair.f_hat_first[i] - pair.f_hat_second[i]).norm();
        if d > worst {
            worst = d;
            at = t;
        }
    }
    let relative = worst / scale;
    Ok(LowFreqReport {
        max_abs_diff: worst,
        relative,
        location: at,
        tolerance: tol,
        pass: relative <= tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub k: u32,
    pub outer: (f64, f64),
    /// Range of `|u|^k w₁(u)` on the outer decade.
    pub w1_scaled: (f64, f64),
    pub w1_pass: bool,
    /// Log-log slope of `||u|^k w₂(u) − 1|` on the outer decade.
    pub w2_slope: f64,
    pub w2_pass: bool,
    /// Largest `C` with `f_first ≥ C ηₙ (1+|x|)^(−k)` on the density window.
    pub floor_c: f64,
    pub floor_pass: bool,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn verify_tail(pair: &DensityPair) -> Result<TailReport> {
    let u_max = pair.u.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    if u_max < 50.0 {
        return Err(invalid(format!("perturbation grid reaches only |u| = {u_max}")));
    }
    let outer = (u_max / 10.0, u_max);
    let k = pair.k as i32;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for (i, &u) in pair.u.iter().enumerate() {
        let au = u.abs();
        if au < outer.0 {
            continue;
        }
        let s1 = au.powi(k) * pair.w_first[i];
        lo = lo.min(s1);
        hi = hi.max(s1);
        let dev = (au.powi(k) * pair.w_second[i] - 1.0).abs();
        if dev > 0.0 {
            lx.push(au.ln());
            ly.push(dev.ln());
        }
    }
    let w2_slope = if lx.len() >= 2 { slope(&lx, &ly) } else { f64::NAN };
    let floor_c = pair
        .x
        .iter()
        .zip(&pair.f_first)
        .map(|(x, f)| f * (1.0 + x.abs()).powi(k) / pair.eta)
        .fold(f64::INFINITY, f64::min);
    Ok(TailReport {
        k: pair.k,
        outer,
        w1_scaled: (lo, hi),
        w1_pass: lo >= TAIL_BAND.0 && hi <= TAIL_BAND.1,
        w2_slope,
        w2_pass: (w2_slope - TAIL_SLOPE.0).abs() <= TAIL_SLOPE.1,
        floor_c,
        floor_pass: floor_c > 0.0,
    })
}

fn max_deviation(values: &[f64], target: f64) -> f64 {
    values.iter().map(|v| (v - target).abs()).fold(0.0, f64::max)
}

/// `δₙ` recomputed from its defining formula.
pub fn expected_delta(kind: PairKind, params: &SpaceParams, vartheta0: f64, theta0: f64) -> f64 {
    let extra = match kind {
        PairKind::Variance => 2.0,
        PairKind::Mean => 1.0,
        PairKind::Proportion => 0.0,
    };
    theta0 * vartheta0 * params.eta() * params.tau().powf(-(params.alpha + extra))
}

/// Every check on a single pair.
pub fn verify_pair(pair: &DensityPair, low_freq_tol: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let zero = pair.freq.len() / 2;
    // ∫w₁ equals ŵ₁(0); the truncated grid integral is only a diagnostic.
    let step_u = pair.u[1] - pair.u[0];
    checks.push(
        Check::at_most("w1_integral", pair.w_hat_first[zero].norm(), W1_ZERO_TOL).detail(format!(
            "trapezoid over the u grid {:.3e}",
            trapezoid(&pair.w_first, step_u)
        )),
    );

    let want = expected_delta(pair.kind, &pair.params, pair.vartheta0, pair.theta0);
    checks.push(Check::at_most("delta_formula", ((pair.delta - want) / want).abs(), 1e-12));
    let gap = pair.targets.1 - pair.targets.0;
    checks.push(
        Check::at_most("parameter_gap", ((gap - pair.delta) / pair.delta).abs(), 1e-6)
            .detail(format!("targets {:?}", pair.targets)),
    );

    for (name, h) in [("h_first", &pair.h_first), ("h_second", &pair.h_second)] {
        let min = h.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check::at_most(&format!("{name}_nonnegative"), (-min).max(0.0), NONNEG_TOL));
        checks.push(Check::at_most(
            &format!("{name}_mass"),
            (trapezoid(h, step_u) - 1.0).abs(),
            MASS_TOL,
        ));
    }
    let step_x = pair.x_step();
    for (name, f) in [("f_first", &pair.f_first), ("f_second", &pair.f_second)] {
        let min = f.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check {
            name: format!("{name}_positive"),
            value: min,
            tolerance: 0.0,
            pass: min > 0.0,
            detail: None,
        });
        checks.push(Check::at_most(
            &format!("{name}_mass"),
            (trapezoid(f, step_x) - 1.0).abs(),
            MASS_TOL,
        ));
    }

    if let Some(sp) = &pair.spectra {
        let mut worst: f64 = 0.0;
        for &t in &ROUNDTRIP_FREQS {
            let (a1, a2) = sp.f_hats(t);
            let b1 = forward_transform(&pair.x, &pair.f_first, t);
            let b2 = forward_transform(&pair.x, &pair.f_second, t);
            worst = worst.max((a1 - b1).norm()).max((a2 - b2).norm());
        }
        checks.push(Check::at_most("transform_roundtrip", worst, ROUNDTRIP_TOL));
    }

    let m = pair.freq.len();
    let mut herm: f64 = 0.0;
    let mut imag: f64 = 0.0;
    for i in 0..m {
        for w in [&pair.w_hat_first, &pair.w_hat_second] {
            herm = herm.max((w[m - 1 - i] - w[i].conj()).norm());
            imag = imag.max(w[i].im.abs());
        }
    }
    checks.push(Check::at_most("w_hat_hermitian", herm, 0.0));
    if pair.kind != PairKind::Mean {
        checks.push(Check::at_most("w_hat_real", imag, 0.0));
    }
    let outside = pair
        .freq
        .iter()
        .zip(&pair.w_hat_second)
        .filter(|(t, _)| t.abs() >= pair.tau + 1.0)
        .map(|(_, w)| w.norm())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("w2_hat_support", outside, 0.0));

    let lf = verify_low_freq_match(pair, low_freq_tol)?;
    checks.push(Check {
        name: "low_frequency_match".into(),
        value: lf.relative,
        tolerance: lf.tolerance,
        pass: lf.pass,
        detail: Some(format!("max at t = {}", lf.location)),
    });

    let tail = verify_tail(pair)?;
    checks.push(Check {
        name: "w1_tail".into(),
        value: max_deviation(&[tail.w1_scaled.0, tail.w1_scaled.1], 1.0),
        tolerance: TAIL_BAND.1 - 1.0,
        pass: tail.w1_pass,
        detail: Some(format!(
            "|u|^{} w1 in [{:.4e}, {:.4e}] on |u| in [{}, {}]",
            tail.k, tail.w1_scaled.0, tail.w1_scaled.1, tail.outer.0, tail.outer.1
        )),
    });
    checks.push(Check {
        name: "w2_tail_slope".into(),
        value: tail.w2_slope,
        tolerance: TAIL_SLOPE.1,
        pass: tail.w2_pass,
        detail: Some(format!("target slope {}", TAIL_SLOPE.0)),
    });
    checks.push(Check {
        name: "f_first_heavy_tail_floor".into(),
        value: tail.floor_c,
        tolerance: 0.0,
        pass: tail.floor_pass,
        detail: None,
    });

    let chi = chi2_details(pair)?;
    let n_chi2 = pair.params.n as f64 * chi.value;
    checks.push(
        Check::at_most("n_chi2", n_chi2, N_CHI2_BOUND)
            .detail(format!("outside-window L2 {:.3e}", chi.outside_l2)),
    );
    Ok(checks)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chi2Decay {
    pub ns: Vec<u64>,
    pub n_chi2: Vec<f64>,
    pub decreasing: bool,
}

/// `n·χ²` across sample sizes, each pair built and shrunk independently.
pub fn chi2_decay(kind: PairKind, params: &SpaceParams, options: PairOptions, ns: &[u64]) -> Result<Chi2Decay> {
    let n_chi2 = ns
        .iter()
        .map(|&n| {
            let p = SpaceParams { n, ..*params };
            let pair = build_pair(kind, &p, options)?;
            Ok(n as f64 * chi2_distance(&pair)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let decreasing = n_chi2.windows(2).all(|w| w[1] < w[0]);
    Ok(Chi2Decay {
        ns: ns.to_vec(),
        n_chi2,
        decreasing,
    })
}

/// Full verification of one pair kind.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub kind: PairKind,
    pub params: SpaceParams,
    pub options: PairOptions,
    pub vartheta0: f64,
    pub halvings: u32,
    pub eta: f64,
    pub tau: f64,
    pub k: u32,
    pub delta: f64,
    pub chi2: Chi2Report,
    pub decay: Chi2Decay,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn lower_bound_report(
    kind: PairKind,
    params: &SpaceParams,
    options: PairOptions,
    low_freq_tol: f64,
    decay_ns: &[u64],
) -> Result<LowerBoundReport> {
    let pair = build_pair(kind, params, options)?;
    let mut checks = verify_pair(&pair, low_freq_tol)?;
    let decay = chi2_decay(kind, params, options, decay_ns)?;
    checks.push(Check {
        name: "n_chi2_decreasing".into(),
        value: decay.n_chi2.last().copied().unwrap_or(f64::NAN),
        tolerance: decay.n_chi2.first().copied().unwrap_or(f64::NAN),
        pass: decay.decreasing,
        detail: Some(format!("n = {:?}: {:?}", decay.ns, decay.n_chi2)),
    });
    let pass = checks.iter().all(|c| c.pass);
    Ok(LowerBoundReport {
        kind,
        params: *params,
        options,
        vartheta0: pair.vartheta0,
        halvings: pair.halvings,
        eta: pair.eta,
        tau: pair.tau,
        k: pair.k,
        delta: pair.delta,
        chi2: chi2_details(&pair)?,
        decay,
        checks,
        pass,
    })
}
