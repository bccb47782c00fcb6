//! Estimators of the null mean and variance from the phase and modulus of the
//! empirical characteristic function at `t̂ₙ(γ)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ecf::{threshold_freq, CfHandle, EmpiricalCf, FrequencyThreshold};
use crate::error::{invalid, Error, Result};
use crate::sample::Sample;
use crate::scalar::{to_f64, Real};

/// Default tuning exponent for both null estimators and the proportion.
pub const DEFAULT_GAMMA: f64 = 0.2;

/// Moduli below this are treated as zero by the functionals.
pub const MODULUS_FLOOR: f64 = 1e-300;

/// Null mean and standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullParams<F> {
    pub u0: F,
    pub sigma0: F,
}

impl<F: Real> NullParams<F> {
    pub fn new(u0: F, sigma0: F) -> Result<Self> {
        if !u0.is_finite() || !sigma0.is_finite() || sigma0 <= F::zero() {
            return Err(invalid(format!(
                "null parameters need finite u0 and sigma0 > 0, got ({u0}, {sigma0})"
            )));
        }
        Ok(Self { u0, sigma0 })
    }

    pub fn standard() -> Self {
        Self {
            u0: F::zero(),
            sigma0: F::one(),
        }
    }
}

fn product_at<F: Real, C: CfHandle<F> + ?Sized>(xi: &C, t: F) -> Result<(Complex<F>, F)> {
    let (v, d) = xi.value_and_deriv(t);
    let modulus = v.norm();
    if !(to_f64(modulus) >= MODULUS_FLOOR) {
        return Err(Error::DegenerateModulus {
            t: to_f64(t),
            modulus: to_f64(modulus),
        });
    }
    Ok((v.conj() * d, v.norm_sqr()))
}

/// `−Re(conj ξ(t) · ξ'(t)) / (t |ξ(t)|²)`.
pub fn sigma_functional<F: Real, C: CfHandle<F> + ?Sized>(xi: &C, t: F) -> Result<F> {
    if !(t > F::zero()) || !t.is_finite() {
        return Err(invalid(format!("sigma functional needs finite t > 0, got {t}")));
    }
    let (p, m2) = product_at(xi, t)?;
    Ok(-p.re / (t * m2))
}

/// `Im(conj ξ(t) · ξ'(t)) / |ξ(t)|²`.
pub fn mean_functional<F: Real, C: CfHandle<F> + ?Sized>(xi: &C, t: F) -> Result<F> {
    if !(t > F::zero()) || !t.is_finite() {
        return Err(invalid(format!("mean functional needs finite t > 0, got {t}")));
    }
    let (p, m2) = product_at(xi, t)?;
    Ok(p.im / m2)
}

/// Null estimate together with the threshold it was read at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullEstimate<F> {
    pub params: NullParams<F>,
    pub sigma0_sq: F,
    pub threshold: FrequencyThreshold<F>,
}

/// `(û₀, σ̂₀)` from the functionals of the empirical CF at `t̂ₙ(γ)`.
pub fn estimate_null<F: Real>(sample: &Sample<F>, gamma: F) -> Result<NullParams<F>> {
    estimate_null_detailed(sample, gamma).map(|e| e.params)
}

/// As [`estimate_null`], also returning `σ̂₀²` and the threshold.
pub fn estimate_null_detailed<F: Real>(sample: &Sample<F>, gamma: F) -> Result<NullEstimate<F>> {
    let threshold = threshold_freq(sample, gamma)?;
    let t = threshold.t_hat;
    let cf = EmpiricalCf::new(sample);
    let (p, m2) = product_at(&cf, t)?;
    let sigma0_sq = -p.re / (t * m2);
    let u0 = p.im / m2;
    if !(sigma0_sq > F::zero()) {
        return Err(Error::NonpositiveVariance {
            value: to_f64(sigma0_sq),
        });
    }
    Ok(NullEstimate {
        params: NullParams {
            u0,
            sigma0: sigma0_sq.sqrt(),
        },
        sigma0_sq,
        threshold,
    })
}
