use crate::error::{invalid, Result};
use crate::scalar::Real;

/// A vector of test statistics with optional ground truth (`true` = nonnull).
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<F> {
    values: Vec<F>,
    truth: Option<Vec<bool>>,
}

impl<F: Real> Sample<F> {
    pub fn new(values: Vec<F>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("sample is empty"));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!("sample value {i} is not finite")));
        }
        Ok(Self {
            values,
            truth: None,
        })
    }

    pub fn with_truth(values: Vec<F>, truth: Vec<bool>) -> Result<Self> {
        if truth.len() != values.len() {
            return Err(invalid(format!(
                "truth has length {} but sample has {}",
                truth.len(),
                values.len()
            )));
        }
        let mut s = Self::new(values)?;
        s.truth = Some(truth);
        Ok(s)
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn truth(&self) -> Option<&[bool]> {
        self.truth.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a `Sample` holds at least one value.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `x -> a x + b` to every value, keeping the truth labels.
    pub fn affine(&self, a: F, b: F) -> Result<Self> {
        let values = self.values.iter().map(|&x| a * x + b).collect();
        match &self.truth {
            Some(t) => Self::with_truth(values, t.clone()),
            None => Self::new(values),
        }
    }

    pub fn into_parts(self) -> (Vec<F>, Option<Vec<bool>>) {
        (self.values, self.truth)
    }
}
