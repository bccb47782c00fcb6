//! Published Monte-Carlo MSEs, stored in absolute units.

use super::harness::Estimator;
use super::settings::SettingId;

struct Series {
    setting: SettingId,
    estimator: Estimator,
    unit: f64,
    values: &'static [f64],
}

const SERIES: &[Series] = &[
    Series { setting: SettingId::S1, estimator: Estimator::EpsCj, unit: 1e-4,
        values: &[15.1, 11.8, 8.58, 5.90, 4.14, 3.81, 6.33, 16.5, 46.1, 91.6, 142.0] },
    Series { setting: SettingId::S1, estimator: Estimator::U0Cj, unit: 1e-4,
        values: &[0.37, 0.93, 1.79, 3.11, 5.40, 9.65, 17.8, 33.3, 63.0, 114.0, 204.0] },
    Series { setting: SettingId::S1, estimator: Estimator::Sigma0SqCj, unit: 1e-4,
        values: &[2.31, 1.57, 1.07, 0.78, 0.68, 0.77, 1.08, 1.70, 2.83, 4.89, 8.84] },
    Series { setting: SettingId::S2, estimator: Estimator::EpsCj, unit: 1e-5,
        values: &[306.6, 102.6, 43.9, 26.1, 17.7, 4.6, 1.7, 0.2] },
    Series { setting: SettingId::S2, estimator: Estimator::U0Cj, unit: 1e-5,
        values: &[596.6, 143.8, 60.5, 31.7, 19.3, 5.8, 1.9, 0.2] },
    Series { setting: SettingId::S2, estimator: Estimator::Sigma0SqCj, unit: 1e-5,
        values: &[74.6, 19.6, 7.1, 3.95, 2.5, 0.6, 0.2, 0.01] },
    Series { setting: SettingId::S3a, estimator: Estimator::EpsCj, unit: 1e-5,
        values: &[5.7, 7.7, 9.0, 9.9, 9.3, 10.3, 10.0, 11.2, 11.5, 10.1] },
    Series { setting: SettingId::S3a, estimator: Estimator::EpsEfron, unit: 1e-5,
        values: &[3.3, 14.6, 33.4, 60.3, 95.8, 139.0, 190.0, 249.0, 316.0, 394.0] },
    Series { setting: SettingId::S3a, estimator: Estimator::EpsStorey, unit: 1e-5,
        values: &[2.4, 8.9, 19.5, 32.9, 49.9, 72.8, 99.7, 130.0, 163.0, 195.0] },
    Series { setting: SettingId::S3b, estimator: Estimator::EpsCj, unit: 1e-5,
        values: &[67.3, 53.7, 41.8, 31.7, 24.0, 17.6, 13.2, 9.4, 7.0, 4.8] },
    Series { setting: SettingId::S3b, estimator: Estimator::EpsEfron, unit: 1e-5,
        values: &[172.0, 164.0, 153.0, 146.0, 138.0, 129.0, 122.0, 114.0, 108.0, 100.0] },
    Series { setting: SettingId::S3b, estimator: Estimator::EpsStorey, unit: 1e-5,
        values: &[89.0, 81.6, 72.2, 67.7, 61.9, 55.4, 50.3, 46.7, 43.5, 41.0] },
    Series { setting: SettingId::S4a, estimator: Estimator::EpsCj, unit: 1e-4,
        values: &[8.17, 7.28, 6.35, 5.65, 4.92, 4.20, 3.78, 3.02, 2.51, 2.01] },
    Series { setting: SettingId::S4a, estimator: Estimator::EpsStorey, unit: 1e-4,
        values: &[3.25, 6.79, 9.76, 14.35, 19.93, 19.69, 23.68, 21.67, 21.01, 20.18] },
    Series { setting: SettingId::S4b, estimator: Estimator::EpsCj, unit: 1e-4,
        values: &[11.9, 10.7, 9.7, 8.7, 7.9, 7.1, 6.5, 5.8, 5.3, 4.8] },
    Series { setting: SettingId::S4b, estimator: Estimator::U0Cj, unit: 1e-4,
        values: &[0.16, 0.18, 0.19, 0.18, 0.19, 0.19, 0.20, 0.22, 0.23, 0.23] },
    Series { setting: SettingId::S4b, estimator: Estimator::Sigma0SqCj, unit: 1e-4,
        values: &[4.1, 4.1, 4.2, 4.2, 4.0, 3.9, 3.7, 3.6, 3.5, 3.3] },
    Series { setting: SettingId::S4c, estimator: Estimator::EpsCj, unit: 1e-3,
        values: &[8.8, 10.3, 16.6, 25.2, 34.7, 43.2] },
    Series { setting: SettingId::S4c, estimator: Estimator::U0Cj, unit: 1e-3,
        values: &[10.4, 37.5, 63.8, 94.4, 131.7, 150.0] },
    Series { setting: SettingId::S4c, estimator: Estimator::Sigma0Cj, unit: 1e-3,
        values: &[5.4, 13.5, 23.0, 34.8, 49.3, 52.1] },
    Series { setting: SettingId::S4c, estimator: Estimator::EpsEfron, unit: 1e-3,
        values: &[34.3, 34.1, 33.5, 33.2, 33.2, 32.3] },
    Series { setting: SettingId::S4c, estimator: Estimator::U0Efron, unit: 1e-3,
        values: &[1.2, 2.8, 4.0, 5.4, 7.0, 8.8] },
    Series { setting: SettingId::S4c, estimator: Estimator::Sigma0Efron, unit: 1e-3,
        values: &[14.7, 18.1, 21.7, 28.1, 34.7, 33.5] },
];

/// Published MSE for `estimator` at `grid_value` of `setting`, if any.
pub fn published_mse(setting: SettingId, estimator: Estimator, grid_value: f64) -> Option<f64> {
    let grid = setting.paper_grid();
    let idx = grid.iter().position(|&g| (g - grid_value).abs() <= 1e-9 * g.abs().max(1.0))?;
    SERIES
        .iter()
        .find(|s| s.setting == setting && s.estimator == estimator)
        .map(|s| s.values[idx] * s.unit)
}
