//! Multiple-testing procedures: BH step-up, adaptive BH, Lfdr and AdaptZ.

use serde::{Deserialize, Serialize};

use crate::baseline::{normal_pdf, PValueVector};
use crate::error::{invalid, Error, Result};
use crate::kde::DensityEstimate;
use crate::null_estimation::NullParams;
use crate::proportion::ProportionEstimate;
use crate::sample::Sample;
use crate::scalar::{lit, to_f64, Real};

/// Smallest admissible `1 − ε̂` for procedures that divide by it.
pub const MIN_NULL_FRACTION: f64 = 1e-6;

/// Which hypotheses were rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionSet {
    rejected: Vec<bool>,
    count: usize,
}

impl RejectionSet {
    pub fn from_flags(rejected: Vec<bool>) -> Self {
        let count = rejected.iter().filter(|&&r| r).count();
        Self { rejected, count }
    }

    pub fn rejected(&self) -> &[bool] {
        &self.rejected
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// A rejection set with its realised false discovery proportion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestingOutcome {
    pub rejections: RejectionSet,
    pub fdp: Option<f64>,
    pub nominal_level: f64,
}

impl TestingOutcome {
    pub fn new(rejections: RejectionSet, truth: Option<&[bool]>, nominal_level: f64) -> Result<Self> {
        let fdp = truth.map(|t| evaluate_fdp(&rejections, t)).transpose()?;
        Ok(Self {
            rejections,
            fdp,
            nominal_level,
        })
    }
}

fn ascending_order<F: Real>(values: &[F]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    idx
}

/// Step-up at any positive level; levels above 1 are allowed here.
fn step_up<F: Real>(p: &[F], level: f64) -> RejectionSet {
    let n = p.len();
    let order = ascending_order(p);
    let nf = n as f64;
    let k_star = (1..=n)
        .rev()
        .find(|&k| to_f64(p[order[k - 1]]) <= k as f64 * level / nf);
    let flags = match k_star {
        Some(k) => {
            let cut = p[order[k - 1]];
            p.iter().map(|&v| v <= cut).collect()
        }
        None => vec![false; n],
    };
    RejectionSet::from_flags(flags)
}

/// Benjamini–Hochberg step-up at level `alpha`.
pub fn bh_stepup<F: Real>(pvals: &PValueVector<F>, alpha: f64) -> Result<RejectionSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(step_up(pvals.values(), alpha))
}

/// Step-up at `α / (1 − ε̂)` using the clamped proportion.
pub fn adaptive_bh<F: Real>(
    pvals: &PValueVector<F>,
    alpha: f64,
    eps_hat: &ProportionEstimate<F>,
) -> Result<RejectionSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let eps = to_f64(eps_hat.clamped);
    if !(1.0 - eps >= MIN_NULL_FRACTION) {
        return Err(Error::LevelOverflow { eps });
    }
    Ok(step_up(pvals.values(), alpha / (1.0 - eps)))
}

/// `(1 − ε̂) φ((x − u₀)/σ₀)/σ₀ / f̃(x)`, capped at 1.
pub fn lfdr_values<F: Real>(
    sample: &Sample<F>,
    eps_hat: &ProportionEstimate<F>,
    null: &NullParams<F>,
    f_tilde: &DensityEstimate<F>,
) -> Result<Vec<F>> {
    let pi0 = (1.0 - to_f64(eps_hat.clamped)).max(MIN_NULL_FRACTION);
    let (u0, s0) = (to_f64(null.u0), to_f64(null.sigma0));
    sample
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = to_f64(f_tilde.eval(x));
            let x = to_f64(x);
            if !(f > 0.0) {
                return Err(Error::DensitySupport { index: i, x });
            }
            let null_density = normal_pdf((x - u0) / s0) / s0;
            Ok(lit((pi0 * null_density / f).min(1.0)))
        })
        .collect()
}

/// Rejects the `k*` smallest Lfdr values, `k*` the largest `k` whose running
/// mean is at most `alpha`; values tied with the `k*`-th are rejected too.
pub fn adaptz_from_lfdr<F: Real>(lfdr: &[F], alpha: f64) -> RejectionSet {
    let order = ascending_order(lfdr);
    let mut running = 0.0;
    let mut k_star = 0;
    for (k, &i) in order.iter().enumerate() {
        running += to_f64(lfdr[i]);
        if running / (k + 1) as f64 <= alpha {
            k_star = k + 1;
        }
    }
    let flags = if k_star == 0 {
        vec![false; lfdr.len()]
    } else {
        let cut = lfdr[order[k_star - 1]];
        lfdr.iter().map(|&v| v <= cut).collect()
    };
    RejectionSet::from_flags(flags)
}

/// AdaptZ: Lfdr thresholding with a running-mean rule.
pub fn adaptz<F: Real>(
    sample: &Sample<F>,
    alpha: f64,
    eps_hat: &ProportionEstimate<F>,
    null: &NullParams<F>,
    f_tilde: &DensityEstimate<F>,
) -> Result<RejectionSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let lfdr = lfdr_values(sample, eps_hat, null, f_tilde)?;
    Ok(adaptz_from_lfdr(&lfdr, alpha))
}

/// False rejections over `max(1, rejections)`.
pub fn evaluate_fdp(rej: &RejectionSet, truth: &[bool]) -> Result<f64> {
    if truth.len() != rej.rejected.len() {
        return Err(invalid("truth and rejection set differ in length"));
    }
    let false_rejections = rej
        .rejected
        .iter()
        .zip(truth)
        .filter(|(&r, &nonnull)| r && !nonnull)
        .count();
    Ok(false_rejections as f64 / rej.count.max(1) as f64)
}

/// [`evaluate_fdp`] on a sample's recorded truth.
pub fn evaluate_fdp_on<F: Real>(rej: &RejectionSet, sample: &Sample<F>) -> Result<f64> {
    let truth = sample
        .truth()
        .ok_or_else(|| invalid("sample carries no truth labels"))?;
    evaluate_fdp(rej, truth)
}
