use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::baseline::{normal_cdf, normal_pdf};
use crate::ecf::CfHandle;
use crate::error::{invalid, Result};
use crate::null_estimation::NullParams;

/// `Uniform(lo, hi)` law of a nonnull mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformLaw {
    pub lo: f64,
    pub hi: f64,
}

impl UniformLaw {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn validate(&self) -> Result<()> {
        if self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi {
            Ok(())
        } else {
            Err(invalid(format!("uniform law needs lo < hi, got {self:?}")))
        }
    }

    fn centre(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// `E exp(i t μ)` and its derivative.
    fn cf(&self, t: f64) -> (Complex<f64>, Complex<f64>) {
        let c = self.centre();
        let hw = self.half_width();
        let z = t * hw;
        let (sinc, dsinc) = sinc_and_deriv(z);
        let phase = Complex::from_polar(1.0, t * c);
        let value = phase * sinc;
        let deriv = Complex::new(0.0, c) * value + phase * (hw * dsinc);
        (value, deriv)
    }
}

/// `sin z / z` and its derivative, with series near zero.
fn sinc_and_deriv(z: f64) -> (f64, f64) {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        (1.0 - z2 / 6.0 + z2 * z2 / 120.0, -z / 3.0 + z * z2 / 30.0)
    } else {
        let (s, c) = z.sin_cos();
        (s / z, (z * c - s) / (z * z))
    }
}

/// Law of the nonnull statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonNullLaw {
    /// Equal mixture of `N(μ₁, σ²)` and `N(μ₂, σ²)` with uniform means.
    GaussianTwoComponent {
        mu1: UniformLaw,
        mu2: UniformLaw,
        sigma: f64,
    },
    /// Equal mixture of Laplace laws `DE(μ₁, τ)` and `DE(μ₂, τ)`.
    DoubleExpTwoComponent {
        mu1: UniformLaw,
        mu2: UniformLaw,
        tau: f64,
    },
    /// A single `N(u, σ²)`.
    PointMass { u: f64, sigma: f64 },
}

/// The generative model `(1 − ε) N(u₀, σ₀²) + ε · nonnull`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub eps: f64,
    pub null: NullParams<f64>,
    pub nonnull: NonNullLaw,
}

/// Means used throughout the simulation settings.
pub const MU1_LAW: UniformLaw = UniformLaw::new(-0.9, -0.1);
pub const MU2_LAW: UniformLaw = UniformLaw::new(0.5, 1.5);

impl MixtureSpec {
    pub fn new(eps: f64, null: NullParams<f64>, nonnull: NonNullLaw) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(invalid(format!("eps must lie in [0, 1], got {eps}")));
        }
        NullParams::new(null.u0, null.sigma0)?;
        let scale = match nonnull {
            NonNullLaw::GaussianTwoComponent { mu1, mu2, sigma } => {
                mu1.validate()?;
                mu2.validate()?;
                sigma
            }
            NonNullLaw::DoubleExpTwoComponent { mu1, mu2, tau } => {
                mu1.validate()?;
                mu2.validate()?;
                tau
            }
            NonNullLaw::PointMass { u, sigma } => {
                if !u.is_finite() {
                    return Err(invalid("point mass location must be finite"));
                }
                sigma
            }
        };
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(invalid(format!("nonnull scale must be positive, got {scale}")));
        }
        Ok(Self { eps, null, nonnull })
    }

    /// Gaussian two-component model with the standard uniform means.
    pub fn gaussian(eps: f64, null: NullParams<f64>, sigma: f64) -> Result<Self> {
        Self::new(
            eps,
            null,
            NonNullLaw::GaussianTwoComponent {
                mu1: MU1_LAW,
                mu2: MU2_LAW,
                sigma,
            },
        )
    }

    /// Laplace two-component model with the standard uniform means.
    pub fn double_exp(eps: f64, null: NullParams<f64>, tau: f64) -> Result<Self> {
        Self::new(
            eps,
            null,
            NonNullLaw::DoubleExpTwoComponent {
                mu1: MU1_LAW,
                mu2: MU2_LAW,
                tau,
            },
        )
    }

    /// Characteristic function of the nonnull law and its derivative.
    fn nonnull_cf(&self, t: f64) -> (Complex<f64>, Complex<f64>) {
        match self.nonnull {
            NonNullLaw::GaussianTwoComponent { mu1, mu2, sigma } => {
                let v = sigma * sigma;
                let k = (-0.5 * v * t * t).exp();
                let dk = -v * t * k;
                two_component(mu1, mu2, t, k, dk)
            }
            NonNullLaw::DoubleExpTwoComponent { mu1, mu2, tau } => {
                let q = 1.0 + tau * tau * t * t;
                let k = 1.0 / q;
                let dk = -2.0 * tau * tau * t / (q * q);
                two_component(mu1, mu2, t, k, dk)
            }
            NonNullLaw::PointMass { u, sigma } => {
                let v = sigma * sigma;
                let value = Complex::from_polar((-0.5 * v * t * t).exp(), u * t);
                (value, value * Complex::new(-v * t, u))
            }
        }
    }

    fn null_cf(&self, t: f64) -> (Complex<f64>, Complex<f64>) {
        let v = self.null.sigma0 * self.null.sigma0;
        let value = Complex::from_polar((-0.5 * v * t * t).exp(), self.null.u0 * t);
        (value, value * Complex::new(-v * t, self.null.u0))
    }

    /// Density of the nonnull law at `x`.
    pub fn nonnull_density(&self, x: f64) -> f64 {
        match self.nonnull {
            NonNullLaw::GaussianTwoComponent { mu1, mu2, sigma } => {
                let part = |m: UniformLaw| {
                    (normal_cdf((x - m.lo) / sigma) - normal_cdf((x - m.hi) / sigma)) / (m.hi - m.lo)
                };
                0.5 * (part(mu1) + part(mu2))
            }
            NonNullLaw::DoubleExpTwoComponent { mu1, mu2, tau } => {
                let laplace_cdf = |y: f64| {
                    if y < 0.0 {
                        0.5 * (y / tau).exp()
                    } else {
                        1.0 - 0.5 * (-y / tau).exp()
                    }
                };
                let part = |m: UniformLaw| (laplace_cdf(x - m.lo) - laplace_cdf(x - m.hi)) / (m.hi - m.lo);
                0.5 * (part(mu1) + part(mu2))
            }
            NonNullLaw::PointMass { u, sigma } => normal_pdf((x - u) / sigma) / sigma,
        }
    }

    /// Null density `φ((x − u₀)/σ₀)/σ₀`.
    pub fn null_density(&self, x: f64) -> f64 {
        normal_pdf((x - self.null.u0) / self.null.sigma0) / self.null.sigma0
    }

    /// Marginal density of the mixture.
    pub fn density(&self, x: f64) -> f64 {
        (1.0 - self.eps) * self.null_density(x) + self.eps * self.nonnull_density(x)
    }
}

fn two_component(
    mu1: UniformLaw,
    mu2: UniformLaw,
    t: f64,
    k: f64,
    dk: f64,
) -> (Complex<f64>, Complex<f64>) {
    let (a, da) = mu1.cf(t);
    let (b, db) = mu2.cf(t);
    let m = (a + b) * 0.5;
    let dm = (da + db) * 0.5;
    (m * k, dm * k + m * dk)
}

impl CfHandle<f64> for MixtureSpec {
    fn value(&self, t: f64) -> Complex<f64> {
        self.value_and_deriv(t).0
    }

    fn deriv(&self, t: f64) -> Complex<f64> {
        self.value_and_deriv(t).1
    }

    fn value_and_deriv(&self, t: f64) -> (Complex<f64>, Complex<f64>) {
        let (n0, dn0) = self.null_cf(t);
        let (h, dh) = self.nonnull_cf(t);
        let w = 1.0 - self.eps;
        (n0 * w + h * self.eps, dn0 * w + dh * self.eps)
    }
}

/// `φ(t) = E exp(i t X)` under the model.
pub fn model_cf(spec: &MixtureSpec, t: f64) -> Result<Complex<f64>> {
    if !t.is_finite() {
        return Err(invalid("frequency must be finite"));
    }
    Ok(spec.value(t))
}
