use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Parameters of the density class and the sample size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    /// Tail exponent of the base perturbation, `> 2`.
    pub alpha: f64,
    /// Sparsity exponent in `[0, 1/2)`.
    pub beta: f64,
    pub eps0: f64,
    /// Moment order, `> 0`.
    pub q: f64,
    /// Scale of the null component, `> 0`.
    pub a: f64,
    /// Moment bound, `> √(a²+1)·M_q^(1/q)`.
    pub big_a: f64,
    pub n: u64,
}

/// `E|Z|^q` for a standard normal `Z`.
pub fn normal_abs_moment(q: f64) -> f64 {
    2f64.powf(q / 2.0) * libm::tgamma((q + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

impl SpaceParams {
    /// `(α, β, ε₀, q, a) = (3, 1/4, 1/2, 2, 1)` with `A` at twice its bound.
    pub fn standard(n: u64) -> Self {
        let (q, a) = (2.0, 1.0);
        Self {
            alpha: 3.0,
            beta: 0.25,
            eps0: 0.5,
            q,
            a,
            big_a: 2.0 * Self::moment_floor(q, a),
            n,
        }
    }

    fn moment_floor(q: f64, a: f64) -> f64 {
        (a * a + 1.0).sqrt() * normal_abs_moment(q).powf(1.0 / q)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 2.0
            && (0.0..0.5).contains(&self.beta)
            && self.eps0 > 0.0
            && self.eps0 < 1.0
            && self.q > 0.0
            && self.a > 0.0
            && self.n >= 2
            && self.alpha.is_finite()
            && self.q.is_finite()
            && self.a.is_finite();
        if !ok {
            return Err(invalid(format!("parameters outside the admissible class: {self:?}")));
        }
        if !(self.big_a > Self::moment_floor(self.q, self.a)) {
            return Err(invalid(format!(
                "A = {} must exceed sqrt(a^2 + 1) M_q^(1/q) = {}",
                self.big_a,
                Self::moment_floor(self.q, self.a)
            )));
        }
        Ok(())
    }

    /// `ηₙ = ε₀ n^(−β)`.
    pub fn eta(&self) -> f64 {
        self.eps0 * (self.n as f64).powf(-self.beta)
    }

    /// `τₙ = √(3 log n) / a`.
    pub fn tau(&self) -> f64 {
        (3.0 * (self.n as f64).ln()).sqrt() / self.a
    }

    /// Smallest even integer above `2q + 1`.
    pub fn k(&self) -> u32 {
        2 * ((2.0 * self.q + 1.0) / 2.0).floor() as u32 + 2
    }
}
