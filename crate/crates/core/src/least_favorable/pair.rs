use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::cutoff::{smooth_cutoff_s1, smooth_cutoff_s2, xi_base};
use super::params::SpaceParams;
use super::transform::{Nodes, Tabulated};

/// Halvings of `ϑ₀` tried before giving up.
pub const MAX_HALVINGS: u32 = 40;
/// Slack allowed on `h ≥ 0` for quadrature noise in the spatial transform.
pub const NONNEG_TOL: f64 = 1e-6;
/// `log2` of the number of frequency grid steps over `[−T, T]`.
pub const FREQ_STEPS_LOG2: u32 = 16;
/// Extra frequency range beyond `τₙ`.
pub const FREQ_MARGIN: f64 = 4.0;
/// Half-width of the perturbation grid.
pub const U_MAX: f64 = 60.0;
pub const U_STEP: f64 = 0.05;
/// Density window half-width in units of `√(a²+1)`.
pub const X_SPREAD: f64 = 6.0;
pub const X_STEP: f64 = 0.05;

/// `ŵ₁` carries `t^(−α)` beyond this point, where `s₁ = 1`.
const W1_TAIL_START: f64 = 5.0 / 3.0;
/// Gaussian damping beyond the support is carried until `e^(−50)`.
const DAMPING_EXPONENT: f64 = 100.0;

/// Target parameter separated by a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Variance,
    Mean,
    Proportion,
}

impl PairKind {
    pub const ALL: [PairKind; 3] = [Self::Variance, Self::Mean, Self::Proportion];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Variance => "variance",
            Self::Mean => "mean",
            Self::Proportion => "proportion",
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown pair kind '{s}'")))
    }
}

/// Construction options.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairOptions {
    pub vartheta0: f64,
    pub theta0: f64,
    /// Halve `ϑ₀` until the `h`'s and `f`'s are nonnegative on their grids.
    pub auto_shrink: bool,
    /// Amplitude of a bump `(1 − (t/τ)²)²` added to `ŵ₂` on `|t| ≤ τₙ`.
    pub fault: f64,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            vartheta0: 0.1,
            theta0: 0.1,
            auto_shrink: true,
            fault: 0.0,
        }
    }
}

/// Closed-form spectra of one pair at fixed constants.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Spectra {
    pub kind: PairKind,
    pub alpha: f64,
    pub k: u32,
    pub a2: f64,
    pub eta: f64,
    pub tau: f64,
    pub vartheta0: f64,
    pub delta: f64,
    pub fault: f64,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Spectra {
    fn new(kind: PairKind, p: &SpaceParams, vartheta0: f64, theta0: f64, fault: f64) -> Self {
        let (eta, tau) = (p.eta(), p.tau());
        let power = match kind {
            PairKind::Variance => p.alpha + 2.0,
            PairKind::Mean => p.alpha + 1.0,
            PairKind::Proportion => p.alpha,
        };
        Self {
            kind,
            alpha: p.alpha,
            k: p.k(),
            a2: p.a * p.a,
            eta,
            tau,
            vartheta0,
            delta: theta0 * vartheta0 * eta * tau.powf(-power),
            fault,
        }
    }

    pub fn w_first(&self, t: f64) -> Complex64 {
        real(smooth_cutoff_s1(t) * xi_base(t, self.k, self.alpha))
    }

    /// Spectrum that makes the `f̂`'s agree wherever `s₂ = 1`.
    fn matching(&self, t: f64) -> Complex64 {
        let (eta, th, d) = (self.eta, self.vartheta0, self.delta);
        let w1 = self.w_first(t).re;
        match self.kind {
            PairKind::Variance => {
                let g = 0.5 * d * t * t;
                real(g.exp() * w1 + (1.0 - eta) / (th * eta) * g.exp_m1())
            }
            PairKind::Mean => Complex64::new(w1, -2.0 * (1.0 - eta) / (th * eta) * (0.5 * d * t).sin()),
            PairKind::Proportion => real((eta - d) / eta * w1 - d / (th * eta) * (-0.5 * t * t).exp_m1()),
        }
    }

    fn bump(&self, t: f64) -> f64 {
        if self.fault == 0.0 || t.abs() > self.tau {
            return 0.0;
        }
        let r = 1.0 - (t / self.tau).powi(2);
        self.fault * r * r
    }

    pub fn w_second(&self, t: f64) -> Complex64 {
        self.matching(t) * smooth_cutoff_s2(t, self.tau) + self.bump(t)
    }

    /// Variance of the null component of the second density.
    fn second_null_var(&self) -> f64 {
        match self.kind {
            PairKind::Variance => self.a2 + self.delta,
            _ => self.a2,
        }
    }

    /// Centres of `(h_first, h_second)`.
    fn h_shifts(&self) -> (f64, f64) {
        match self.kind {
            PairKind::Mean => (0.5 * self.delta, -0.5 * self.delta),
            _ => (0.0, 0.0),
        }
    }

    /// Shift of the perturbation term of `(f_first, f_second)`.
    fn shifts(&self) -> (f64, f64) {
        match self.kind {
            PairKind::Mean => (0.5 * self.delta, 0.5 * self.delta),
            _ => (0.0, 0.0),
        }
    }

    /// Weights on the perturbation of `(f_first, f_second)`.
    fn pert_coefs(&self) -> (f64, f64) {
        let e = self.eta * self.vartheta0;
        match self.kind {
            PairKind::Proportion => ((self.eta - self.delta) * self.vartheta0, e),
            _ => (e, e),
        }
    }

    /// Gaussian components `(weight, mean, variance)` of both densities.
    fn gaussians(&self) -> (Vec<(f64, f64, f64)>, Vec<(f64, f64, f64)>) {
        let (eta, d, a2) = (self.eta, self.delta, self.a2);
        match self.kind {
            PairKind::Variance => (
                vec![(1.0 - eta, 0.0, a2), (eta, 0.0, a2 + 1.0)],
                vec![(1.0 - eta, 0.0, a2 + d), (eta, 0.0, a2 + 1.0)],
            ),
            PairKind::Mean => (
                vec![(1.0 - eta, 0.0, a2), (eta, 0.5 * d, a2 + 1.0)],
                vec![(1.0 - eta, d, a2), (eta, 0.5 * d, a2 + 1.0)],
            ),
            PairKind::Proportion => (
                vec![(1.0 - eta + d, 0.0, a2), (eta - d, 0.0, a2 + 1.0)],
                vec![(1.0 - eta, 0.0, a2), (eta, 0.0, a2 + 1.0)],
            ),
        }
    }

    /// `(ĥ_first, ĥ_second)` at `t`.
    pub fn h_hats(&self, t: f64) -> (Complex64, Complex64) {
        let th = self.vartheta0;
        let g = (-0.5 * t * t).exp();
        match self.kind {
            PairKind::Variance => (
                real(g) + self.w_first(t) * th,
                real((-0.5 * (1.0 - self.delta) * t * t).exp()) + self.w_second(t) * th,
            ),
            PairKind::Mean => {
                let ph = Complex64::from_polar(1.0, 0.5 * self.delta * t);
                (ph * (self.w_first(t) * th + g), ph.conj() * (self.w_second(t) * th + g))
            }
            PairKind::Proportion => (real(g) + self.w_first(t) * th, real(g) + self.w_second(t) * th),
        }
    }

    /// `(f̂_first, f̂_second)` assembled from the `ĥ`'s.
    pub fn f_hats(&self, t: f64) -> (Complex64, Complex64) {
        let (eta, d) = (self.eta, self.delta);
        let (h1, h2) = self.h_hats(t);
        let damp = (-0.5 * self.a2 * t * t).exp();
        match self.kind {
            PairKind::Variance => {
                let damp2 = (-0.5 * self.second_null_var() * t * t).exp();
                (
                    (h1 * eta + (1.0 - eta)) * damp,
                    (h2 * eta + (1.0 - eta)) * damp2,
                )
            }
            PairKind::Mean => (
                (h1 * eta + (1.0 - eta)) * damp,
                (h2 * eta + (1.0 - eta)) * Complex64::from_polar(damp, d * t),
            ),
            PairKind::Proportion => (
                (h1 * (eta - d) + (1.0 - eta + d)) * damp,
                (h2 * eta + (1.0 - eta)) * damp,
            ),
        }
    }

    /// `f̂_second − f̂_first` in closed form, without the shift phase.
    fn diff_core(&self, t: f64) -> Complex64 {
        let s2 = smooth_cutoff_s2(t, self.tau);
        if s2 == 1.0 && self.bump(t) == 0.0 {
            return real(0.0);
        }
        let damp = (-0.5 * self.second_null_var() * t * t).exp();
        let lead = self.matching(t) * (s2 - 1.0) + self.bump(t);
        lead * (damp * self.eta * self.vartheta0)
    }
}

fn gaussian_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    (-0.5 * z * z / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

fn symmetric_grid(half: f64, step: f64) -> Vec<f64> {
    let m = (half / step).round() as i64;
    (-m..=m).map(|i| i as f64 * step).collect()
}

/// Two densities whose target parameters differ by `δₙ`, tabulated in space
/// and frequency.
#[derive(Clone, Debug)]
pub struct DensityPair {
    pub kind: PairKind,
    pub params: SpaceParams,
    pub options: PairOptions,
    /// `ϑ₀` after shrinking.
    pub vartheta0: f64,
    pub theta0: f64,
    pub halvings: u32,
    pub eta: f64,
    pub tau: f64,
    pub k: u32,
    pub delta: f64,
    /// Target parameter of each density: `a²` / `a² + δ`, `0` / `δ`, or
    /// `η − δ` / `η`.
    pub targets: (f64, f64),
    /// Symmetric frequency grid over `[−T, T]`.
    pub freq: Vec<f64>,
    pub w_hat_first: Vec<Complex64>,
    pub w_hat_second: Vec<Complex64>,
    pub f_hat_first: Vec<Complex64>,
    pub f_hat_second: Vec<Complex64>,
    /// Perturbation grid; `h`'s are tabulated at `u + shift`.
    pub u: Vec<f64>,
    pub h_shifts: (f64, f64),
    pub w_first: Vec<f64>,
    pub w_second: Vec<f64>,
    pub h_first: Vec<f64>,
    pub h_second: Vec<f64>,
    /// Density window.
    pub x: Vec<f64>,
    pub f_first: Vec<f64>,
    pub f_second: Vec<f64>,
    /// `f_second − f_first` from its own spectrum.
    pub diff: Vec<f64>,
    /// `∫ (f_second − f_first)²` over the real line by Parseval.
    pub diff_l2_total: f64,
    pub(crate) spectra: Option<Spectra>,
}

struct Stage {
    spectra: Spectra,
    w_second: Vec<f64>,
    h_first: Vec<f64>,
    h_second: Vec<f64>,
    f_first: Vec<f64>,
    f_second: Vec<f64>,
}

impl Stage {
    fn admissible(&self) -> bool {
        let h_ok = self.h_first.iter().chain(&self.h_second).all(|&h| h >= -NONNEG_TOL);
        let f_ok = self.f_first.iter().chain(&self.f_second).all(|&f| f > 0.0);
        h_ok && f_ok
    }
}

fn breakpoints(tau: f64) -> Vec<f64> {
    vec![
        1.0 / 3.0,
        2.0 / 3.0,
        1.0,
        4.0 / 3.0,
        W1_TAIL_START,
        tau + 1.0 / 3.0,
        tau + 2.0 / 3.0,
    ]
}

fn panel_width(x_max: f64) -> f64 {
    (3.0 / x_max).min(0.1)
}

fn mixture(gs: &[(f64, f64, f64)], x: f64) -> f64 {
    gs.iter().map(|&(w, m, v)| w * gaussian_pdf(x, m, v)).sum()
}

/// Builds the pair, shrinking `ϑ₀` when `options.auto_shrink` is set.
pub fn build_pair(kind: PairKind, params: &SpaceParams, options: PairOptions) -> Result<DensityPair> {
    params.validate()?;
    if !(options.vartheta0 > 0.0 && options.theta0 > 0.0) {
        return Err(invalid("vartheta0 and theta0 must be positive"));
    }
    let (eta, tau) = (params.eta(), params.tau());
    let a2 = params.a * params.a;
    let breaks = breakpoints(tau);

    let u = symmetric_grid(U_MAX, U_STEP);
    let x_half = X_SPREAD * (a2 + 1.0).sqrt();
    let x = symmetric_grid(x_half, X_STEP);
    let t_damped = ((tau + 2.0 / 3.0).powi(2) + DAMPING_EXPONENT / a2).sqrt();

    // w₁ does not depend on ϑ₀; tabulate once.
    let spectra0 = Spectra::new(kind, params, options.vartheta0, options.theta0, options.fault);
    let w1_nodes = Nodes::new(0.0, W1_TAIL_START, &breaks, panel_width(U_MAX));
    let w1_tab = Tabulated::new(&w1_nodes, |t| spectra0.w_first(t)).with_power_tail(
        W1_TAIL_START,
        params.alpha,
        1.0,
    );
    let w_first = w1_tab.eval_many(&u)?;

    let u_nodes = Nodes::new(0.0, tau + 2.0 / 3.0, &breaks, panel_width(U_MAX));
    let x_nodes = Nodes::new(0.0, t_damped, &breaks, panel_width(x_half + 1.0));
    let f1_pert = Tabulated::new(&x_nodes, |t| spectra0.w_first(t) * (-0.5 * a2 * t * t).exp());

    let stage_for = |vartheta0: f64| -> Result<Stage> {
        let sp = Spectra::new(kind, params, vartheta0, options.theta0, options.fault);
        let w2_tab = Tabulated::new(&u_nodes, |t| sp.w_second(t));
        let w_second = w2_tab.eval_many(&u)?;
        let var2 = match kind {
            PairKind::Variance => 1.0 - sp.delta,
            _ => 1.0,
        };
        let h_first: Vec<f64> = u
            .iter()
            .zip(&w_first)
            .map(|(&v, &w)| gaussian_pdf(v, 0.0, 1.0) + vartheta0 * w)
            .collect();
        let h_second: Vec<f64> = u
            .iter()
            .zip(&w_second)
            .map(|(&v, &w)| gaussian_pdf(v, 0.0, var2) + vartheta0 * w)
            .collect();

        let v2 = sp.second_null_var();
        let pert2 = Tabulated::new(&x_nodes, |t| sp.w_second(t) * (-0.5 * v2 * t * t).exp());
        let (s1, s2) = sp.shifts();
        let shift_by = |s: f64| x.iter().map(|&v| v - s).collect::<Vec<f64>>();
        let f1_pert_values = f1_pert.eval_many(&shift_by(s1))?;
        let pert2_values = pert2.eval_many(&shift_by(s2))?;
        let (c1, c2) = sp.pert_coefs();
        let (g1, g2) = sp.gaussians();
        let f_first = x
            .iter()
            .zip(&f1_pert_values)
            .map(|(&v, &p)| mixture(&g1, v) + c1 * p)
            .collect();
        let f_second = x
            .iter()
            .zip(&pert2_values)
            .map(|(&v, &p)| mixture(&g2, v) + c2 * p)
            .collect();
        Ok(Stage {
            spectra: sp,
            w_second,
            h_first,
            h_second,
            f_first,
            f_second,
        })
    };

    let mut vartheta0 = options.vartheta0;
    let mut halvings = 0;
    let stage = loop {
        let stage = stage_for(vartheta0)?;
        if !options.auto_shrink || stage.admissible() {
            break stage;
        }
        if halvings == MAX_HALVINGS {
            return Err(Error::ConstructionFailed { halvings });
        }
        halvings += 1;
        vartheta0 *= 0.5;
    };
    let sp = stage.spectra;

    let d_nodes = Nodes::new(
        if options.fault != 0.0 { 0.0 } else { tau + 1.0 / 3.0 },
        t_damped,
        &breaks,
        panel_width(x_half + 1.0),
    );
    let d_tab = Tabulated::new(&d_nodes, |t| sp.diff_core(t));
    let (_, s2) = sp.shifts();
    let shifted: Vec<f64> = x.iter().map(|&v| v - s2).collect();
    let diff = d_tab.eval_many(&shifted)?;
    let diff_l2_total = d_tab.l2_norm_sq();

    let t_max = tau + FREQ_MARGIN;
    let steps = 1usize << FREQ_STEPS_LOG2;
    let freq: Vec<f64> = (0..=steps)
        .map(|i| t_max * (2 * i as i64 - steps as i64) as f64 / steps as f64)
        .collect();
    let spectral: Vec<(Complex64, Complex64, Complex64, Complex64)> = freq
        .par_iter()
        .map(|&t| {
            let (f1, f2) = sp.f_hats(t);
            (sp.w_first(t), sp.w_second(t), f1, f2)
        })
        .collect();
    let mut w_hat_first = Vec::with_capacity(freq.len());
    let mut w_hat_second = Vec::with_capacity(freq.len());
    let mut f_hat_first = Vec::with_capacity(freq.len());
    let mut f_hat_second = Vec::with_capacity(freq.len());
    for (a, b, c, d) in spectral {
        w_hat_first.push(a);
        w_hat_second.push(b);
        f_hat_first.push(c);
        f_hat_second.push(d);
    }

    let delta = sp.delta;
    let targets = match kind {
        PairKind::Variance => (a2, a2 + delta),
        PairKind::Mean => (0.0, delta),
        PairKind::Proportion => (eta - delta, eta),
    };
    Ok(DensityPair {
        kind,
        params: *params,
        options,
        vartheta0,
        theta0: options.theta0,
        halvings,
        eta,
        tau,
        k: params.k(),
        delta,
        targets,
        freq,
        w_hat_first,
        w_hat_second,
        f_hat_first,
        f_hat_second,
        h_shifts: sp.h_shifts(),
        u,
        w_first,
        w_second: stage.w_second,
        h_first: stage.h_first,
        h_second: stage.h_second,
        x,
        f_first: stage.f_first,
        f_second: stage.f_second,
        diff,
        diff_l2_total,
        spectra: Some(sp),
    })
}

impl DensityPair {
    /// A pair given only by two densities on a uniform grid.
    pub fn from_tabulated(x: Vec<f64>, f_first: Vec<f64>, f_second: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || f_first.len() != x.len() || f_second.len() != x.len() {
            return Err(invalid("tabulated pair needs matching grids of length >= 2"));
        }
        let diff: Vec<f64> = f_second.iter().zip(&f_first).map(|(b, a)| b - a).collect();
        let step = x[1] - x[0];
        let diff_l2_total = crate::quadrature::trapezoid(&diff.iter().map(|d| d * d).collect::<Vec<_>>(), step);
        Ok(Self {
            kind: PairKind::Variance,
            params: SpaceParams::standard(2),
            options: PairOptions::default(),
            vartheta0: 0.0,
            theta0: 0.0,
            halvings: 0,
            eta: 0.0,
            tau: 0.0,
            k: 0,
            delta: 0.0,
            targets: (0.0, 0.0),
            freq: Vec::new(),
            w_hat_first: Vec::new(),
            w_hat_second: Vec::new(),
            f_hat_first: Vec::new(),
            f_hat_second: Vec::new(),
            u: Vec::new(),
            h_shifts: (0.0, 0.0),
            w_first: Vec::new(),
            w_second: Vec::new(),
            h_first: Vec::new(),
            h_second: Vec::new(),
            x,
            f_first,
            f_second,
            diff,
            diff_l2_total,
            spectra: None,
        })
    }

    /// The same pair with the roles of the two densities exchanged.
    pub fn swapped(&self) -> Self {
        let mut p = self.clone();
        std::mem::swap(&mut p.f_first, &mut p.f_second);
        std::mem::swap(&mut p.f_hat_first, &mut p.f_hat_second);
        std::mem::swap(&mut p.h_first, &mut p.h_second);
        std::mem::swap(&mut p.w_first, &mut p.w_second);
        std::mem::swap(&mut p.w_hat_first, &mut p.w_hat_second);
        p.targets = (p.targets.1, p.targets.0);
        p.h_shifts = (p.h_shifts.1, p.h_shifts.0);
        p.diff.iter_mut().for_each(|d| *d = -*d);
        p.spectra = None;
        p
    }

    pub fn x_step(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    /// Spatial tables as CSV: `grid,point,w_first,w_second,h_first,h_second`
    /// rows on the `u` grid followed by `x,f_first,f_second,diff` rows.
    pub fn spatial_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["grid", "point", "first", "second", "third", "fourth"])?;
        for i in 0..self.u.len() {
            w.write_record([
                "u".to_string(),
                self.u[i].to_string(),
                self.w_first[i].to_string(),
                self.w_second[i].to_string(),
                self.h_first[i].to_string(),
                self.h_second[i].to_string(),
            ])?;
        }
        for i in 0..self.x.len() {
            w.write_record([
                "x".to_string(),
                self.x[i].to_string(),
                self.f_first[i].to_string(),
                self.f_second[i].to_string(),
                self.diff[i].to_string(),
                String::new(),
            ])?;
        }
        csv_string(w)
    }

    /// Frequency tables as CSV, keeping every `stride`-th grid point.
    pub fn frequency_csv(&self, stride: usize) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "t",
            "w_hat_first_re",
            "w_hat_first_im",
            "w_hat_second_re",
            "w_hat_second_im",
            "f_hat_first_re",
            "f_hat_first_im",
            "f_hat_second_re",
            "f_hat_second_im",
        ])?;
        for i in (0..self.freq.len()).step_by(stride.max(1)) {
            let row = [
                self.freq[i],
                self.w_hat_first[i].re,
                self.w_hat_first[i].im,
                self.w_hat_second[i].re,
                self.w_hat_second[i].im,
                self.f_hat_first[i].re,
                self.f_hat_first[i].im,
                self.f_hat_second[i].re,
                self.f_hat_second[i].im,
            ];
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        csv_string(w)
    }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
}
