//! Inverse Fourier transforms of Hermitian spectra by composite Gauss–Legendre
//! panels on `[0, T]`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::quadrature::{integrate_to_infinity, GaussLegendre};

const PANEL_ORDER: usize = 20;
const TAIL_RTOL: f64 = 1e-12;
const TAIL_ATOL: f64 = 1e-18;

/// Quadrature nodes on `[start, end]`, split at `breaks` and into panels no
/// wider than `max_width`.
#[derive(Clone, Debug)]
pub(crate) struct Nodes {
    pub t: Vec<f64>,
    pub w: Vec<f64>,
}

impl Nodes {
    pub fn new(start: f64, end: f64, breaks: &[f64], max_width: f64) -> Self {
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b > start && b < end).collect();
        cuts.push(start);
        cuts.push(end);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let gl = GaussLegendre::new(PANEL_ORDER);
        let (mut t, mut w) = (Vec::new(), Vec::new());
        for seg in cuts.windows(2) {
            let panels = ((seg[1] - seg[0]) / max_width).ceil().max(1.0) as usize;
            let h = (seg[1] - seg[0]) / panels as f64;
            for p in 0..panels {
                let lo = seg[0] + p as f64 * h;
                for (ti, wi) in gl.mapped(lo, lo + h) {
                    t.push(ti);
                    w.push(wi);
                }
            }
        }
        Self { t, w }
    }
}

/// `∫_b^∞ cos(t x) t^(−α) dt`, rotating the contour to `t = b + i s`.
pub fn power_tail_cos(b: f64, alpha: f64, x: f64) -> Result<f64> {
    let x = x.abs();
    if x == 0.0 {
        return Ok(b.powf(1.0 - alpha) / (alpha - 1.0));
    }
    let term = |s: f64| {
        let r = (b * b + s * s).sqrt().powf(-alpha);
        let th = alpha * s.atan2(b);
        let e = (-x * s).exp();
        (e * r * th.cos(), -e * r * th.sin())
    };
    let jr = integrate_to_infinity(|s| term(s).0, 0.0, TAIL_RTOL, TAIL_ATOL)?;
    let ji = integrate_to_infinity(|s| term(s).1, 0.0, TAIL_RTOL, TAIL_ATOL)?;
    let (sn, cs) = (b * x).sin_cos();
    Ok(-sn * jr - cs * ji)
}

/// A Hermitian spectrum sampled on quadrature nodes, with an optional
/// `coef·t^(−α)` tail beyond the last node.
#[derive(Clone, Debug)]
pub(crate) struct Tabulated {
    t: Vec<f64>,
    w: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    tail: Option<(f64, f64, f64)>,
}

impl Tabulated {
    pub fn new(nodes: &Nodes, f: impl Fn(f64) -> Complex64) -> Self {
        let (re, im) = nodes.t.iter().map(|&t| {
            let z = f(t);
            (z.re, z.im)
        }).unzip();
        Self {
            t: nodes.t.clone(),
            w: nodes.w.clone(),
            re,
            im,
            tail: None,
        }
    }

    /// Adds `coef·∫_b^∞ cos(t x) t^(−α) dt` to every evaluation.
    pub fn with_power_tail(mut self, b: f64, alpha: f64, coef: f64) -> Self {
        self.tail = Some((b, alpha, coef));
        self
    }

    /// `(1/π) ∫₀^∞ [cos(t x) Re ŵ(t) + sin(t x) Im ŵ(t)] dt`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut acc = 0.0;
        for i in 0..self.t.len() {
            let (s, c) = (self.t[i] * x).sin_cos();
            acc += self.w[i] * (c * self.re[i] + s * self.im[i]);
        }
        if let Some((b, alpha, coef)) = self.tail {
            acc += coef * power_tail_cos(b, alpha, x)?;
        }
        Ok(acc / std::f64::consts::PI)
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }

    /// `(1/π) ∫₀^∞ |ŵ|²` over the nodes, i.e. `∫ w²` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        let s: f64 = (0..self.t.len())
            .map(|i| self.w[i] * (self.re[i] * self.re[i] + self.im[i] * self.im[i]))
            .sum();
        s / std::f64::consts::PI
    }
}

/// `∫ f(x) e^(i t x) dx` by the trapezoid rule on a uniform grid.
pub fn forward_transform(x: &[f64], f: &[f64], t: f64) -> Complex64 {
    let m = x.len();
    if m < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let step = x[1] - x[0];
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        let wgt = if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
        let (s, c) = (t * x[i]).sin_cos();
        acc += Complex64::new(c, s) * (wgt * f[i]);
    }
    acc * step
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_spectrum_inverts_to_density() {
        let nodes = Nodes::new(0.0, 12.0, &[], 0.1);
        let tab = Tabulated::new(&nodes, |t| Complex64::new((-0.5 * t * t).exp(), 0.0));
        for x in [0.0f64, 0.7, 2.5, -3.0] {
            let want = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((tab.eval(x).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn shifted_spectrum_moves_the_density() {
        let nodes = Nodes::new(0.0, 12.0, &[], 0.1);
        let tab = Tabulated::new(&nodes, |t| Complex64::from_polar((-0.5 * t * t).exp(), 0.3 * t));
        let want = (-0.5f64 * 0.2 * 0.2).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((tab.eval(0.5).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn power_tail_at_zero_is_closed_form() {
        let v = power_tail_cos(5.0 / 3.0, 3.0, 0.0).unwrap();
        assert!((v - 0.5 * 0.36).abs() < 1e-15);
    }

    #[test]
    fn power_tail_matches_direct_quadrature() {
        // Direct panels to a far cutoff, then the leading remainder term
        // −sin(B x)/(x B^α) of integration by parts.
        let (b, alpha) = (5.0 / 3.0, 3.0);
        for x in [0.4, 2.5, 17.0] {
            let big = 4000.0;
            let nodes = Nodes::new(b, big, &[], 0.02);
            let direct: f64 = nodes
                .t
                .iter()
                .zip(&nodes.w)
                .map(|(&t, &w)| w * (t * x).cos() * t.powf(-alpha))
                .sum::<f64>()
                - (big * x).sin() / (x * big.powf(alpha));
            let got = power_tail_cos(b, alpha, x).unwrap();
            assert!((got - direct).abs() < 1e-11, "x = {x}: {got} vs {direct}");
        }
    }

    #[test]
    fn forward_transform_of_gaussian() {
        let x: Vec<f64> = (0..=400).map(|i| -10.0 + 0.05 * i as f64).collect();
        let f: Vec<f64> = x
            .iter()
            .map(|v| (-0.5 * v * v).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .collect();
        let z = forward_transform(&x, &f, 1.3);
        assert!((z.re - (-0.5f64 * 1.69).exp()).abs() < 1e-14);
        assert!(z.im.abs() < 1e-14);
    }
}
