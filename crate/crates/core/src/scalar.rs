use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar accepted by the estimators.
///
/// Implemented for `f32` and `f64`. Accuracy targets quoted in the docs
/// assume `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into `F`.
#[inline]
pub(crate) fn lit<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant representable in target scalar")
}

#[inline]
pub(crate) fn from_usize<F: Real>(n: usize) -> F {
    F::from_usize(n).expect("usize representable in target scalar")
}

#[inline]
pub(crate) fn to_f64<F: Real>(x: F) -> f64 {
    x.to_f64().expect("scalar converts to f64")
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CompensatedSum<F> {
    sum: F,
    comp: F,
}

impl<F: Real> CompensatedSum<F> {
    pub(crate) fn new() -> Self {
        Self {
            sum: F::zero(),
            comp: F::zero(),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> F {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub(crate) fn compensated_sum<F: Real>(it: impl IntoIterator<Item = F>) -> F {
    let mut acc = CompensatedSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn many_tenths() {
        let s = compensated_sum(std::iter::repeat(0.1f64).take(1_000_000));
        assert!((s - 100_000.0).abs() < 1e-9);
        let s32 = compensated_sum(std::iter::repeat(0.1f32).take(100_000));
        assert!((s32 - 10_000.0).abs() < 1e-2);
    }

    #[test]
    fn conversions() {
        assert_eq!(lit::<f32>(0.5), 0.5f32);
        assert_eq!(from_usize::<f64>(7), 7.0);
        assert_eq!(to_f64(1.5f32), 1.5);
    }
}
