//! Gaussian kernel density estimation with Silverman or leave-one-out
//! likelihood bandwidths.

use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::baseline::normal_pdf;
use crate::error::{invalid, Error, Result};
use crate::sample::Sample;
use crate::scalar::{lit, to_f64, Real};

/// Minimum sample size.
pub const KDE_MIN_N: usize = 10;
/// Samples larger than this use the binned evaluator.
pub const BINNED_MIN_N: usize = 1000;
/// Grid points for binned estimates.
pub const BIN_COUNT: usize = 2048;
/// Kernel truncation in bandwidths for the binned convolution.
const KERNEL_CUTOFF: f64 = 6.0;
/// Default cross-validation grid: 20 log-spaced multiples of the Silverman
/// bandwidth between these factors.
pub const LOO_GRID_POINTS: usize = 20;
pub const LOO_GRID_RANGE: (f64, f64) = (0.1, 3.0);

/// How the bandwidth is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// `0.9·min(sd, IQR/1.34)·n^(−1/5)`.
    Silverman,
    /// Maximise the leave-one-out log-likelihood over this grid.
    LooCv(Vec<f64>),
    /// Leave-one-out over the default grid around the Silverman bandwidth.
    LooCvDefault,
    Fixed(f64),
}

#[derive(Clone, Debug)]
struct Binned {
    origin: f64,
    step: f64,
    density: Vec<f64>,
}

impl Binned {
    fn build(data: &[f64], h: f64) -> Self {
        let lo = data[0] - KERNEL_CUTOFF * h;
        let hi = data[data.len() - 1] + KERNEL_CUTOFF * h;
        // Keep at least four grid steps per bandwidth.
        let bins = BIN_COUNT.max(((hi - lo) / (0.25 * h)).ceil() as usize + 1).min(1 << 16);
        let step = (hi - lo) / (bins - 1) as f64;
        let mut weights = vec![0.0; bins];
        for &x in data {
            let pos = (x - lo) / step;
            let k = (pos.floor() as usize).min(bins - 2);
            let frac = pos - k as f64;
            weights[k] += 1.0 - frac;
            weights[k + 1] += frac;
        }
        let reach = ((KERNEL_CUTOFF * h / step).ceil() as usize).min(bins - 1);
        let kernel: Vec<f64> = (0..=reach)
            .map(|j| normal_pdf(j as f64 * step / h))
            .collect();
        let norm = 1.0 / (data.len() as f64 * h);
        let density = (0..bins)
            .map(|k| {
                let a = k.saturating_sub(reach);
                let b = (k + reach).min(bins - 1);
                let mut s = 0.0;
                for (m, w) in weights.iter().enumerate().take(b + 1).skip(a) {
                    s += w * kernel[k.abs_diff(m)];
                }
                s * norm
            })
            .collect();
        Self {
            origin: lo,
            step,
            density,
        }
    }

    fn eval(&self, x: f64) -> Option<f64> {
        let pos = (x - self.origin) / self.step;
        if !(pos >= 0.0) || pos > (self.density.len() - 1) as f64 {
            return None;
        }
        let k = (pos.floor() as usize).min(self.density.len() - 2);
        let frac = pos - k as f64;
        Some(((1.0 - frac) * self.density[k] + frac * self.density[k + 1]).max(0.0))
    }
}

/// A fitted kernel density estimate.
#[derive(Clone, Debug)]
pub struct DensityEstimate<F> {
    data: Vec<f64>,
    bandwidth: f64,
    binned: Option<Binned>,
    _scalar: PhantomData<F>,
}

impl<F: Real> DensityEstimate<F> {
    pub fn bandwidth(&self) -> F {
        lit(self.bandwidth)
    }

    pub fn eval(&self, x: F) -> F {
        let x = to_f64(x);
        let v = self
            .binned
            .as_ref()
            .and_then(|b| b.eval(x))
            .unwrap_or_else(|| exact_density(&self.data, self.bandwidth, x));
        lit(v)
    }

    /// Kernel sum without binning.
    pub fn eval_exact(&self, x: F) -> F {
        lit(exact_density(&self.data, self.bandwidth, to_f64(x)))
    }
}

/// Exact Gaussian KDE at `x`; `data` must be sorted.
fn exact_density(data: &[f64], h: f64, x: f64) -> f64 {
    let reach = 9.0 * h;
    let start = data.partition_point(|&d| d < x - reach);
    let end = data.partition_point(|&d| d <= x + reach);
    let s: f64 = data[start..end]
        .iter()
        .map(|&d| normal_pdf((x - d) / h))
        .sum();
    s / (data.len() as f64 * h)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let k = pos.floor() as usize;
    let frac = pos - k as f64;
    if k + 1 < sorted.len() {
        sorted[k] + frac * (sorted[k + 1] - sorted[k])
    } else {
        sorted[k]
    }
}

/// Silverman's rule on sorted data.
fn silverman(sorted: &[f64]) -> Result<f64> {
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let sd = (sorted.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    let iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * n.powf(-0.2))
}

/// Leave-one-out log-likelihood of bandwidth `h`.
fn loo_score(sorted: &[f64], h: f64) -> f64 {
    let n = sorted.len() as f64;
    let self_term = normal_pdf(0.0) / h;
    let full: Vec<f64> = if sorted.len() > BINNED_MIN_N {
        let b = Binned::build(sorted, h);
        sorted
            .iter()
            .map(|&x| b.eval(x).unwrap_or_else(|| exact_density(sorted, h, x)))
            .collect()
    } else {
        sorted.iter().map(|&x| exact_density(sorted, h, x)).collect()
    };
    full.iter()
        .map(|&f| ((n * f - self_term) / (n - 1.0)).max(1e-300).ln())
        .sum()
}

/// Log-spaced default cross-validation grid around `h_ref`.
pub fn default_loo_grid(h_ref: f64) -> Vec<f64> {
    let (a, b) = LOO_GRID_RANGE;
    let (la, lb) = (a.ln(), b.ln());
    (0..LOO_GRID_POINTS)
        .map(|i| h_ref * (la + (lb - la) * i as f64 / (LOO_GRID_POINTS - 1) as f64).exp())
        .collect()
}

/// Bandwidth maximising the leave-one-out likelihood; ties keep the first.
pub fn select_loo_bandwidth<F: Real>(sample: &Sample<F>, grid: &[f64]) -> Result<f64> {
    let sorted = sorted_values(sample)?;
    select_on_sorted(&sorted, grid)
}

fn select_on_sorted(sorted: &[f64], grid: &[f64]) -> Result<f64> {
    if grid.is_empty() || grid.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
        return Err(invalid("bandwidth grid must be nonempty and positive"));
    }
    let mut best = (f64::NEG_INFINITY, grid[0]);
    for &h in grid {
        let s = loo_score(sorted, h);
        if s > best.0 {
            best = (s, h);
        }
    }
    Ok(best.1)
}

fn sorted_values<F: Real>(sample: &Sample<F>) -> Result<Vec<f64>> {
    if sample.len() < KDE_MIN_N {
        return Err(invalid(format!(
            "density estimation needs at least {KDE_MIN_N} observations"
        )));
    }
    let mut v: Vec<f64> = sample.values().iter().map(|&x| to_f64(x)).collect();
    v.sort_by(f64::total_cmp);
    if v[0] == v[v.len() - 1] {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    Ok(v)
}

/// Gaussian kernel density estimate of a sample.
pub fn kde<F: Real>(sample: &Sample<F>, rule: &BandwidthRule) -> Result<DensityEstimate<F>> {
    let sorted = sorted_values(sample)?;
    let h = match rule {
        BandwidthRule::Silverman => silverman(&sorted)?,
        BandwidthRule::LooCv(grid) => select_on_sorted(&sorted, grid)?,
        BandwidthRule::LooCvDefault => select_on_sorted(&sorted, &default_loo_grid(silverman(&sorted)?))?,
        BandwidthRule::Fixed(h) => {
            if !(*h > 0.0) || !h.is_finite() {
                return Err(invalid("fixed bandwidth must be positive"));
            }
            *h
        }
    };
    Ok(from_sorted(sorted, h))
}

/// Density estimate with a given bandwidth, skipping the minimum-size check.
pub fn kde_with_bandwidth<F: Real>(sample: &Sample<F>, h: f64) -> Result<DensityEstimate<F>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid("bandwidth must be positive"));
    }
    let mut v: Vec<f64> = sample.values().iter().map(|&x| to_f64(x)).collect();
    v.sort_by(f64::total_cmp);
    Ok(from_sorted(v, h))
}

fn from_sorted<F: Real>(sorted: Vec<f64>, h: f64) -> DensityEstimate<F> {
    let binned = (sorted.len() > BINNED_MIN_N).then(|| Binned::build(&sorted, h));
    DensityEstimate {
        data: sorted,
        bandwidth: h,
        binned,
        _scalar: PhantomData,
    }
}
