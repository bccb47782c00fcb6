//! Competitor estimators: two-sided p-values, Storey's proportion estimator
//! and central matching of the histogram peak.

use crate::error::{invalid, Error, Result};
use crate::null_estimation::NullParams;
use crate::proportion::ProportionEstimate;
use crate::sample::Sample;
use crate::scalar::{lit, to_f64, Real};

/// Default Storey tuning parameter.
pub const DEFAULT_STOREY_LAMBDA: f64 = 0.5;

/// Minimum sample size for central matching.
pub const EFRON_MIN_N: usize = 500;

/// Two-sided p-values.
#[derive(Clone, Debug, PartialEq)]
pub struct PValueVector<F> {
    values: Vec<F>,
}

impl<F: Real> PValueVector<F> {
    pub fn new(values: Vec<F>) -> Result<Self> {
        if let Some(i) = values
            .iter()
            .position(|p| !(*p >= F::zero() && *p <= F::one()))
        {
            return Err(invalid(format!("p-value {i} outside [0, 1]")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Standard normal upper tail `1 − Φ(z)`, accurate in the far tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `p_j = 2(1 − Φ(|X_j − u₀|/σ₀))`.
pub fn pvalues_from_null<F: Real>(sample: &Sample<F>, null: &NullParams<F>) -> PValueVector<F> {
    let values = sample
        .values()
        .iter()
        .map(|&x| {
            let z = to_f64(((x - null.u0) / null.sigma0).abs());
            lit::<F>(libm::erfc(z / std::f64::consts::SQRT_2).min(1.0))
        })
        .collect();
    PValueVector { values }
}

/// `ε̂ = 1 − #{p_j > λ} / ((1 − λ) n)`.
pub fn storey_estimator<F: Real>(pvals: &PValueVector<F>, lambda: F) -> Result<ProportionEstimate<F>> {
    if !(lambda > F::zero() && lambda < F::one()) {
        return Err(invalid(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    if pvals.is_empty() {
        return Err(invalid("no p-values"));
    }
    let above = pvals.values.iter().filter(|&&p| p > lambda).count();
    let pi0 = lit::<F>(above as f64) / ((F::one() - lambda) * lit::<F>(pvals.len() as f64));
    Ok(ProportionEstimate::from_raw(F::one() - pi0, None, None))
}

/// Central matching.
///
/// Bins the sample with Scott's width `3.49·sd·n^(−1/3)` on a lattice centred
/// at the median, takes the contiguous run of bins around the modal bin whose
/// counts are at least half the modal count, and fits
/// `log count = b0 + b1 z + b2 z²` by least squares weighted by the counts.
/// The vertex and curvature give `(û₀, σ̂₀)`; the fitted peak height relative
/// to `n × width` gives the null proportion.
pub fn efron_estimator<F: Real>(sample: &Sample<F>) -> Result<(NullParams<F>, ProportionEstimate<F>)> {
    let n = sample.len();
    if n < EFRON_MIN_N {
        return Err(invalid(format!(
            "central matching needs at least {EFRON_MIN_N} observations, got {n}"
        )));
    }
    let xs: Vec<f64> = sample.values().iter().map(|&x| to_f64(x)).collect();
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::Divergence("sample has zero spread".into()));
    }
    let width = 3.49 * sd * nf.powf(-1.0 / 3.0);

    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    // Bin j covers [median + (j − 1/2) w, median + (j + 1/2) w).
    let index = |x: f64| ((x - median) / width + 0.5).floor() as i64;
    let lo = index(sorted[0]);
    let hi = index(sorted[n - 1]);
    let mut counts = vec![0.0f64; (hi - lo + 1) as usize];
    for &x in &xs {
        counts[(index(x) - lo) as usize] += 1.0;
    }

    let mode = counts
        .iter()
        .enumerate()
        .fold(0usize, |best, (i, &c)| if c > counts[best] { i } else { best });
    let half = 0.5 * counts[mode];
    let mut left = mode;
    while left > 0 && counts[left - 1] >= half {
        left -= 1;
    }
    let mut right = mode;
    while right + 1 < counts.len() && counts[right + 1] >= half {
        right += 1;
    }
    if right - left + 1 < 3 {
        return Err(Error::Divergence(format!(
            "central window has {} bins",
            right - left + 1
        )));
    }

    // Weighted normal equations in bin units around the modal bin.
    let mut m = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for (i, &c) in counts.iter().enumerate().take(right + 1).skip(left) {
        let z = i as f64 - mode as f64;
        let basis = [1.0, z, z * z];
        let y = c.ln();
        for a in 0..3 {
            r[a] += c * basis[a] * y;
            for b in 0..3 {
                m[a][b] += c * basis[a] * basis[b];
            }
        }
    }
    let b = solve3(m, r).ok_or_else(|| Error::Divergence("singular fit".into()))?;
    if !(b[2] < 0.0) {
        return Err(Error::Divergence(format!(
            "fitted curvature {:.3e} is not negative",
            b[2]
        )));
    }
    // Back to data units: z = (x − c)/w.
    let centre = median + (lo + mode as i64) as f64 * width;
    let b1 = b[1] / width;
    let b2 = b[2] / (width * width);
    let sigma_sq = -1.0 / (2.0 * b2);
    let offset = b1 * sigma_sq;
    let u0 = centre + offset;
    let log_peak = b[0] + b1 * offset + b2 * offset * offset;
    let pi0 = log_peak.exp() * (2.0 * std::f64::consts::PI).sqrt() * sigma_sq.sqrt() / (nf * width);
    let null = NullParams::new(lit(u0), lit(sigma_sq.sqrt()))
        .map_err(|_| Error::Divergence("fitted null is not finite".into()))?;
    Ok((null, ProportionEstimate::from_raw(lit(1.0 - pi0), None, None)))
}

/// Gaussian elimination with partial pivoting for a 3×3 system.
fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = r[row];
        for k in row + 1..3 {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve3_needs_pivoting() {
        let m = [[0.0, 2.0, 1.0], [1.0, 1.0, 1.0], [2.0, 1.0, 3.0]];
        let x = [1.0, -2.0, 0.5];
        let r = [0, 1, 2].map(|i| m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2]);
        let got = solve3(m, r).unwrap();
        for k in 0..3 {
            assert!((got[k] - x[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn solve3_rejects_singular_systems() {
        let m = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]];
        assert!(solve3(m, [1.0, 2.0, 3.0]).is_none());
    }
}
