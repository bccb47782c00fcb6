//! Empirical and model characteristic functions, and the data-driven
//! frequency threshold `t̂ₙ(γ) = min{t > 0 : |φₙ(t)| ≤ n^(−γ)}`.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::sample::Sample;
use crate::scalar::{from_usize, lit, to_f64, CompensatedSum, Real};

/// Step of the coarse crossing scan.
pub const SCAN_STEP: f64 = 0.01;
/// Absolute bisection tolerance on `t`.
pub const BISECTION_TOL: f64 = 1e-10;

/// Scan steps between exact resynchronisations of the rotation recurrence.
const RESYNC_EVERY: usize = 32;

/// A characteristic function together with its exact derivative.
pub trait CfHandle<F: Real> {
    fn value(&self, t: F) -> Complex<F>;
    fn deriv(&self, t: F) -> Complex<F>;

    fn value_and_deriv(&self, t: F) -> (Complex<F>, Complex<F>) {
        (self.value(t), self.deriv(t))
    }
}

/// The empirical characteristic function of a sample.
#[derive(Clone, Copy, Debug)]
pub struct EmpiricalCf<'a, F> {
    sample: &'a Sample<F>,
}

impl<'a, F: Real> EmpiricalCf<'a, F> {
    pub fn new(sample: &'a Sample<F>) -> Self {
        Self { sample }
    }
}

impl<F: Real> CfHandle<F> for EmpiricalCf<'_, F> {
    fn value(&self, t: F) -> Complex<F> {
        let s = trig_sums(self.sample.values(), t, false);
        s.value(self.sample.len())
    }

    fn deriv(&self, t: F) -> Complex<F> {
        let s = trig_sums(self.sample.values(), t, true);
        s.deriv(self.sample.len())
    }

    fn value_and_deriv(&self, t: F) -> (Complex<F>, Complex<F>) {
        let s = trig_sums(self.sample.values(), t, true);
        let n = self.sample.len();
        (s.value(n), s.deriv(n))
    }
}

/// The null component `(1 − ε)·exp(i u₀ t − σ₀² t² / 2)`.
#[derive(Clone, Copy, Debug)]
pub struct NullComponentCf<F> {
    pub weight: F,
    pub u0: F,
    pub sigma0: F,
}

impl<F: Real> CfHandle<F> for NullComponentCf<F> {
    fn value(&self, t: F) -> Complex<F> {
        let v = self.sigma0 * self.sigma0;
        let modulus = self.weight * (-(v * t * t) / lit(2.0)).exp();
        Complex::from_polar(modulus, self.u0 * t)
    }

    fn deriv(&self, t: F) -> Complex<F> {
        let v = self.sigma0 * self.sigma0;
        self.value(t) * Complex::new(-v * t, self.u0)
    }
}

struct TrigSums<F> {
    cos: F,
    sin: F,
    x_cos: F,
    x_sin: F,
}

impl<F: Real> TrigSums<F> {
    fn value(&self, n: usize) -> Complex<F> {
        let n = from_usize::<F>(n);
        Complex::new(self.cos / n, self.sin / n)
    }

    fn deriv(&self, n: usize) -> Complex<F> {
        let n = from_usize::<F>(n);
        Complex::new(-self.x_sin / n, self.x_cos / n)
    }
}

fn trig_sums<F: Real>(xs: &[F], t: F, with_moments: bool) -> TrigSums<F> {
    let mut c = CompensatedSum::new();
    let mut s = CompensatedSum::new();
    let mut xc = CompensatedSum::new();
    let mut xs_ = CompensatedSum::new();
    for &x in xs {
        let (sn, cs) = (t * x).sin_cos();
        c.add(cs);
        s.add(sn);
        if with_moments {
            xc.add(x * cs);
            xs_.add(x * sn);
        }
    }
    TrigSums {
        cos: c.value(),
        sin: s.value(),
        x_cos: xc.value(),
        x_sin: xs_.value(),
    }
}

fn check_t<F: Real>(t: F) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(invalid("frequency must be finite"))
    }
}

/// `φₙ(t) = (1/n) Σ exp(i t X_j)`, with compensated summation.
pub fn ecf_eval<F: Real>(sample: &Sample<F>, t: F) -> Result<Complex<F>> {
    check_t(t)?;
    Ok(EmpiricalCf::new(sample).value(t))
}

/// `φₙ'(t) = (i/n) Σ X_j exp(i t X_j)`.
pub fn ecf_deriv<F: Real>(sample: &Sample<F>, t: F) -> Result<Complex<F>> {
    check_t(t)?;
    Ok(EmpiricalCf::new(sample).deriv(t))
}

pub(crate) fn check_gamma<F: Real>(gamma: F) -> Result<()> {
    if gamma > F::zero() && gamma < lit(0.5) {
        Ok(())
    } else {
        Err(invalid(format!("gamma must lie in (0, 1/2), got {gamma}")))
    }
}

/// The data-driven frequency `t̂ₙ(γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyThreshold<F> {
    pub t_hat: F,
    pub gamma: F,
    /// `|φₙ(t_hat)|`, at most `n^(−γ)`.
    pub modulus_at_t: F,
}

fn scan_ceiling<F: Real>(n: usize) -> F {
    lit::<F>(3.0) * (lit::<F>(2.0) * from_usize::<F>(n).ln()).sqrt()
}

fn level<F: Real>(n: usize, gamma: F) -> F {
    from_usize::<F>(n).powf(-gamma)
}

fn grid_point<F: Real>(k: usize) -> F {
    from_usize::<F>(k) * lit(SCAN_STEP)
}

/// Shrinks `[lo, hi]` with `modulus(lo) > level ≥ modulus(hi)` and returns
/// `(hi, modulus(hi))`.
fn bisect<F: Real>(modulus: impl Fn(F) -> F, mut lo: F, mut hi: F, hi_mod: F, level: F) -> (F, F) {
    let tol = lit::<F>(BISECTION_TOL).max(hi.abs() * F::epsilon() * lit(4.0));
    let mut hi_mod = hi_mod;
    while hi - lo > tol {
        let mid = lo + (hi - lo) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let m = modulus(mid);
        if m <= level {
            hi = mid;
            hi_mod = m;
        } else {
            lo = mid;
        }
    }
    (hi, hi_mod)
}

/// Scans a modulus function on the fixed grid and refines the first bracket.
fn first_crossing<F: Real>(modulus: impl Fn(F) -> F, level: F, ceiling: F) -> Result<(F, F)> {
    let mut k = 1usize;
    loop {
        let t = grid_point::<F>(k);
        if t > ceiling {
            return Err(Error::ThresholdNotFound {
                level: to_f64(level),
                ceiling: to_f64(ceiling),
            });
        }
        let m = modulus(t);
        if m <= level {
            return Ok(bisect(&modulus, grid_point(k - 1), t, m, level));
        }
        k += 1;
    }
}

/// `t̂ₙ(γ)` for a sample.
///
/// Scans `|φₙ|` on a grid of step [`SCAN_STEP`] up to `3·√(2 log n)`, takes
/// the first bracket containing a crossing of `n^(−γ)` and bisects it to
/// [`BISECTION_TOL`]. The scan advances every `exp(i t X_j)` by a rotation;
/// candidate brackets are confirmed with exact evaluations.
pub fn threshold_freq<F: Real>(sample: &Sample<F>, gamma: F) -> Result<FrequencyThreshold<F>> {
    check_gamma(gamma)?;
    let n = sample.len();
    if n < 2 {
        return Err(invalid("threshold needs at least two observations"));
    }
    let xs = sample.values();
    let level = level(n, gamma);
    let ceiling = scan_ceiling::<F>(n);
    let exact = |t: F| EmpiricalCf::new(sample).value(t).norm();
    let nf = from_usize::<F>(n);
    let margin = lit::<F>(1e-9) + F::epsilon() * lit((64 * RESYNC_EVERY) as f64);

    let step = lit::<F>(SCAN_STEP);
    let rot: Vec<(F, F)> = xs.iter().map(|&x| (step * x).sin_cos()).collect();
    let mut re = vec![F::one(); n];
    let mut im = vec![F::zero(); n];

    let mut k = 1usize;
    loop {
        let t = grid_point::<F>(k);
        if t > ceiling {
            return Err(Error::ThresholdNotFound {
                level: to_f64(level),
                ceiling: to_f64(ceiling),
            });
        }
        let (mut sc, mut ss) = (F::zero(), F::zero());
        if k % RESYNC_EVERY == 0 {
            for ((r, i), &x) in re.iter_mut().zip(im.iter_mut()).zip(xs) {
                let (s, c) = (t * x).sin_cos();
                *r = c;
                *i = s;
                sc = sc + c;
                ss = ss + s;
            }
        } else {
            for ((r, i), &(s, c)) in re.iter_mut().zip(im.iter_mut()).zip(&rot) {
                let nr = *r * c - *i * s;
                let ni = *i * c + *r * s;
                *r = nr;
                *i = ni;
                sc = sc + nr;
                ss = ss + ni;
            }
        }
        let approx = (sc * sc + ss * ss).sqrt() / nf;
        if approx <= level + margin {
            let m = exact(t);
            if m <= level {
                let (t_hat, modulus_at_t) = bisect(exact, grid_point(k - 1), t, m, level);
                return Ok(FrequencyThreshold {
                    t_hat,
                    gamma,
                    modulus_at_t,
                });
            }
        }
        k += 1;
    }
}

/// `tₙ(γ)` computed from an analytic characteristic function with the same
/// scan and bisection as [`threshold_freq`].
pub fn deterministic_threshold_freq<F: Real, C: CfHandle<F> + ?Sized>(
    cf: &C,
    n: usize,
    gamma: F,
) -> Result<F> {
    check_gamma(gamma)?;
    if n < 2 {
        return Err(invalid("threshold needs n >= 2"));
    }
    let (t, _) = first_crossing(|t| cf.value(t).norm(), level(n, gamma), scan_ceiling(n))?;
    Ok(t)
}
