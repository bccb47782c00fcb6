//! Estimators of the nonnull proportion ε.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::ecf::check_gamma;
use crate::error::{invalid, Result};
use crate::null_estimation::{estimate_null_detailed, NullEstimate, NullParams};
use crate::quadrature::integrate;
use crate::sample::Sample;
use crate::scalar::{compensated_sum, from_usize, lit, to_f64, Real};

/// Relative tolerance for the phase-function quadrature.
pub const PHASE_QUAD_RTOL: f64 = 1e-9;

/// A proportion estimate with its unclamped value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate<F> {
    pub raw: F,
    pub clamped: F,
    /// Tuning exponent; `None` for the baselines.
    pub gamma: Option<F>,
    /// Frequency the estimator was evaluated at; `None` for the baselines.
    pub t_used: Option<F>,
}

impl<F: Real> ProportionEstimate<F> {
    pub fn from_raw(raw: F, gamma: Option<F>, t_used: Option<F>) -> Self {
        Self {
            raw,
            clamped: raw.max(F::zero()).min(F::one()),
            gamma,
            t_used,
        }
    }

    /// An externally known proportion, e.g. the truth in oracle runs.
    pub fn known(eps: F) -> Self {
        Self::from_raw(eps, None, None)
    }
}

/// `√(2 γ log n)`.
pub fn point_mass_frequency<F: Real>(n: usize, gamma: F) -> F {
    (lit::<F>(2.0) * gamma * from_usize::<F>(n).ln()).sqrt()
}

fn point_mass<F: Real>(
    n: usize,
    gamma: F,
    standardized: impl Iterator<Item = F>,
) -> ProportionEstimate<F> {
    let t = point_mass_frequency(n, gamma);
    let sum = compensated_sum(standardized.map(|z| (t * z).cos()));
    let scale = from_usize::<F>(n).powf(gamma - F::one());
    ProportionEstimate::from_raw(F::one() - scale * sum, Some(gamma), Some(t))
}

/// `1 − n^(γ−1) Σ cos(√(2γ log n) X_j)` for data already standardized by the
/// null.
pub fn estimate_eps_known_null<F: Real>(sample: &Sample<F>, gamma: F) -> Result<ProportionEstimate<F>> {
    check_gamma(gamma)?;
    Ok(point_mass(sample.len(), gamma, sample.values().iter().copied()))
}

/// The point-mass estimator applied to `(X − u₀)/σ₀` for a given null.
pub fn estimate_eps_with_null<F: Real>(
    sample: &Sample<F>,
    gamma: F,
    null: &NullParams<F>,
) -> Result<ProportionEstimate<F>> {
    check_gamma(gamma)?;
    let (u0, s0) = (null.u0, null.sigma0);
    Ok(point_mass(
        sample.len(),
        gamma,
        sample.values().iter().map(|&x| (x - u0) / s0),
    ))
}

/// Plug-in estimator: standardize by the estimated null, then apply the
/// point-mass estimator.
pub fn estimate_eps_plugin<F: Real>(sample: &Sample<F>, gamma: F) -> Result<ProportionEstimate<F>> {
    estimate_eps_plugin_detailed(sample, gamma).map(|(_, p)| p)
}

/// Plug-in estimator together with the null estimate it used.
pub fn estimate_eps_plugin_detailed<F: Real>(
    sample: &Sample<F>,
    gamma: F,
) -> Result<(NullEstimate<F>, ProportionEstimate<F>)> {
    check_gamma(gamma)?;
    let null = estimate_null_detailed(sample, gamma)?;
    let eps = estimate_eps_with_null(sample, gamma, &null.params)?;
    Ok((null, eps))
}

/// Weight density on `(−1, 1)` for the phase-function estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightDensity {
    Uniform,
    Triangle,
    /// Proportional to `exp(−1/(1 − ξ²))`.
    Smooth,
}

fn smooth_normalizer() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| {
        2.0 * integrate(smooth_kernel, 0.0, 1.0, 1e-14, 0.0)
            .expect("smooth weight normalizer converges")
    })
}

fn smooth_kernel(xi: f64) -> f64 {
    let d = 1.0 - xi * xi;
    if d <= 0.0 {
        0.0
    } else {
        (-1.0 / d).exp()
    }
}

impl WeightDensity {
    pub fn eval(&self, xi: f64) -> f64 {
        if xi.abs() >= 1.0 {
            return 0.0;
        }
        match self {
            Self::Uniform => 0.5,
            Self::Triangle => 1.0 - xi.abs(),
            Self::Smooth => smooth_kernel(xi) / smooth_normalizer(),
        }
    }
}

/// `1 − Re ψₙ(t; ω)` at `t = √(2γ log n)`, where
/// `ψₙ(t; ω) = ∫ ω(ξ) exp(t²ξ²/2) φₙ(tξ) dξ`.
///
/// The imaginary part integrates to zero because ω is symmetric, so only the
/// cosine sum is integrated, over `(0, 1)` and doubled.
pub fn phase_function_estimator<F: Real>(
    sample: &Sample<F>,
    gamma: F,
    omega: WeightDensity,
) -> Result<ProportionEstimate<F>> {
    check_gamma(gamma)?;
    let n = sample.len();
    let t = to_f64(point_mass_frequency(n, gamma));
    let xs: Vec<f64> = sample.values().iter().map(|&x| to_f64(x)).collect();
    let nf = n as f64;
    let integrand = |xi: f64| {
        let s = t * xi;
        let mean_cos = compensated_sum(xs.iter().map(|&x| (s * x).cos())) / nf;
        omega.eval(xi) * (0.5 * s * s).exp() * mean_cos
    };
    let half = integrate(integrand, 0.0, 1.0, PHASE_QUAD_RTOL, 1e-300)?;
    let raw = 1.0 - 2.0 * half;
    if !raw.is_finite() {
        return Err(invalid("phase function is not finite"));
    }
    Ok(ProportionEstimate::from_raw(
        lit(raw),
        Some(gamma),
        Some(lit(t)),
    ))
}
