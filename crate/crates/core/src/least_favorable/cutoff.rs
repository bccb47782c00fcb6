/// Smooth ramp `r(x) = e^(−1/x) / (e^(−1/x) + e^(−1/(1−x)))`, 0 below 0 and
/// 1 above 1.
pub fn ramp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// `((−1)^(k/2) π / (k−1)!) |t|^(k−1)` on `|t| ≤ 1`, `|t|^(−α)` beyond.
pub fn xi_base(t: f64, k: u32, alpha: f64) -> f64 {
    let at = t.abs();
    if at <= 1.0 {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let fact: f64 = (1..k).map(f64::from).product();
        sign * std::f64::consts::PI / fact * at.powi(k as i32 - 1)
    } else {
        at.powf(-alpha)
    }
}

/// 0 for `||t| − 1| ≤ 1/3`, 1 for `||t| − 1| ≥ 2/3`.
pub fn smooth_cutoff_s1(t: f64) -> f64 {
    let d = (t.abs() - 1.0).abs();
    ramp(3.0 * (d - 1.0 / 3.0))
}

/// 1 for `|t| ≤ τ + 1/3`, 0 for `|t| ≥ τ + 2/3`.
pub fn smooth_cutoff_s2(t: f64, tau: f64) -> f64 {
    1.0 - ramp(3.0 * (t.abs() - tau - 1.0 / 3.0))
}
