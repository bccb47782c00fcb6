use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{efron_estimator, pvalues_from_null, storey_estimator};
use crate::error::{invalid, Result};
use crate::kde::kde;
use crate::null_estimation::NullParams;
use crate::proportion::{estimate_eps_plugin_detailed, estimate_eps_with_null, ProportionEstimate};
use crate::sample::Sample;
use crate::testing::{adaptive_bh, adaptz, evaluate_fdp_on};

use super::generate::{replication_rng, sample_block_dependent, sample_mixture};
use super::settings::{Scenario, SettingConfig, SettingId};

/// Quantities whose squared error is tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    EpsCj,
    U0Cj,
    Sigma0SqCj,
    Sigma0Cj,
    EpsEfron,
    U0Efron,
    Sigma0Efron,
    EpsStorey,
}

impl Estimator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::EpsCj => "eps_cj",
            Self::U0Cj => "u0_cj",
            Self::Sigma0SqCj => "sigma0_sq_cj",
            Self::Sigma0Cj => "sigma0_cj",
            Self::EpsEfron => "eps_efron",
            Self::U0Efron => "u0_efron",
            Self::Sigma0Efron => "sigma0_efron",
            Self::EpsStorey => "eps_storey",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Estimators reported for an estimation setting.
pub fn estimators_for(setting: SettingId) -> Vec<Estimator> {
    use Estimator::*;
    match setting {
        SettingId::S1 | SettingId::S2 | SettingId::S4b => vec![EpsCj, U0Cj, Sigma0SqCj],
        SettingId::S3a | SettingId::S3b => vec![EpsCj, EpsEfron, EpsStorey],
        SettingId::S4a => vec![EpsCj, EpsStorey, EpsEfron],
        SettingId::S4c => vec![EpsCj, U0Cj, Sigma0Cj, Sigma0SqCj, EpsEfron, U0Efron, Sigma0Efron],
        SettingId::S5a | SettingId::S5b | SettingId::S5c => vec![],
    }
}

/// Mean and Monte-Carlo standard error of per-replication values.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

/// MSE of one estimator at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MseRow {
    pub grid_index: usize,
    pub grid_value: f64,
    pub estimator: Estimator,
    pub mse: f64,
    pub se: f64,
    pub replications: usize,
    pub failures: usize,
    #[serde(skip)]
    pub squared_errors: Vec<f64>,
}

/// Output of [`run_setting`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MseReport {
    pub config: SettingConfig,
    pub swept_parameter: String,
    pub rows: Vec<MseRow>,
}

impl MseReport {
    pub fn row(&self, estimator: Estimator, grid_index: usize) -> Option<&MseRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.grid_index == grid_index)
    }

    /// MSE of `estimator` across the grid, in grid order.
    pub fn series(&self, estimator: Estimator) -> Vec<f64> {
        let mut rows: Vec<&MseRow> = self.rows.iter().filter(|r| r.estimator == estimator).collect();
        rows.sort_by_key(|r| r.grid_index);
        rows.iter().map(|r| r.mse).collect()
    }
}

fn draw(cfg: &SettingConfig, sc: &Scenario, grid: usize, rep: usize) -> Result<Sample<f64>> {
    let mut rng = replication_rng(cfg.master_seed, grid as u32, rep as u32);
    match sc.block {
        Some(l) => sample_block_dependent(&sc.spec, sc.n, l, &mut rng),
        None => sample_mixture(&sc.spec, sc.n, &mut rng),
    }
}

/// Squared errors of one replication, `None` where the estimator failed.
fn replicate_mse(cfg: &SettingConfig, sc: &Scenario, estimators: &[Estimator], grid: usize, rep: usize) -> Result<Vec<Option<f64>>> {
    use Estimator::*;
    let sample = draw(cfg, sc, grid, rep)?;
    let truth = sc.spec.null;
    let wants = |group: &[Estimator]| estimators.iter().any(|e| group.contains(e));

    let cj: Option<(f64, Option<(f64, f64)>)> = if wants(&[EpsCj, U0Cj, Sigma0SqCj, Sigma0Cj]) {
        if cfg.setting.null_known() {
            estimate_eps_with_null(&sample, sc.gamma, &truth)
                .ok()
                .map(|e| (e.raw, None))
        } else {
            estimate_eps_plugin_detailed(&sample, sc.gamma)
                .ok()
                .map(|(null, e)| (e.raw, Some((null.params.u0, null.sigma0_sq))))
        }
    } else {
        None
    };
    let efron = if wants(&[EpsEfron, U0Efron, Sigma0Efron]) {
        efron_estimator(&sample).ok()
    } else {
        None
    };
    let storey = if wants(&[EpsStorey]) {
        storey_estimator(&pvalues_from_null(&sample, &truth), cfg.storey_lambda).ok()
    } else {
        None
    };

    let sq = |est: f64, target: f64| (est - target) * (est - target);
    let eps = sc.spec.eps;
    Ok(estimators
        .iter()
        .map(|e| match e {
            EpsCj => cj.map(|(v, _)| sq(v, eps)),
            U0Cj => cj.and_then(|(_, n)| n).map(|(u, _)| sq(u, truth.u0)),
            Sigma0SqCj => cj
                .and_then(|(_, n)| n)
                .map(|(_, v)| sq(v, truth.sigma0 * truth.sigma0)),
            Sigma0Cj => cj.and_then(|(_, n)| n).map(|(_, v)| sq(v.sqrt(), truth.sigma0)),
            EpsEfron => efron.map(|(_, p)| sq(p.clamped, eps)),
            U0Efron => efron.map(|(n, _)| sq(n.u0, truth.u0)),
            Sigma0Efron => efron.map(|(n, _)| sq(n.sigma0, truth.sigma0)),
            EpsStorey => storey.map(|p| sq(p.raw, eps)),
        })
        .collect())
}

/// Runs every replication of every grid point in parallel; results are
/// returned in (grid, rep) order regardless of scheduling.
fn run_tasks<T: Send>(
    cfg: &SettingConfig,
    task: impl Fn(usize, usize) -> Result<T> + Sync,
) -> Result<Vec<Vec<T>>> {
    let reps = cfg.replications;
    let flat: Vec<T> = (0..cfg.grid.len() * reps)
        .into_par_iter()
        .map(|k| task(k / reps, k % reps))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(cfg.grid.len());
    let mut it = flat.into_iter();
    for _ in 0..cfg.grid.len() {
        out.push(it.by_ref().take(reps).collect());
    }
    Ok(out)
}

/// Monte-Carlo MSE of the estimators of an estimation setting.
pub fn run_setting(cfg: &SettingConfig) -> Result<MseReport> {
    cfg.validate()?;
    if cfg.setting.is_testing() {
        return Err(invalid(format!(
            "setting {} is a testing setting; use run_testing_setting",
            cfg.setting
        )));
    }
    let estimators = estimators_for(cfg.setting);
    let scenarios: Vec<Scenario> = cfg.grid.iter().map(|&g| cfg.scenario(g)).collect::<Result<_>>()?;
    let results = run_tasks(cfg, |g, r| replicate_mse(cfg, &scenarios[g], &estimators, g, r))?;

    let mut rows = Vec::new();
    for (g, reps) in results.iter().enumerate() {
        for (j, &est) in estimators.iter().enumerate() {
            let squared_errors: Vec<f64> = reps.iter().filter_map(|r| r[j]).collect();
            let failures = reps.len() - squared_errors.len();
            let (mse, se) = mean_and_se(&squared_errors);
            rows.push(MseRow {
                grid_index: g,
                grid_value: cfg.grid[g],
                estimator: est,
                mse,
                se,
                replications: squared_errors.len(),
                failures,
                squared_errors,
            });
        }
    }
    Ok(MseReport {
        config: cfg.clone(),
        swept_parameter: cfg.setting.swept_parameter().to_string(),
        rows,
    })
}

/// Testing procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    AdaptiveBh,
    Adaptz,
}

impl Procedure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::AdaptiveBh => "adaptive_bh",
            Self::Adaptz => "adaptz",
        }
    }
}

/// Source of the proportion (and, for AdaptZ, the null) fed to a procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestingEstimator {
    Cj,
    Storey,
    Efron,
    Oracle,
}

impl TestingEstimator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Cj => "cj",
            Self::Storey => "storey",
            Self::Efron => "efron",
            Self::Oracle => "oracle",
        }
    }
}

/// FDR and FDP accuracy of one (procedure, estimator) at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdrRow {
    pub grid_index: usize,
    pub grid_value: f64,
    pub procedure: Procedure,
    pub estimator: TestingEstimator,
    /// Mean FDP.
    pub fdr: f64,
    pub fdr_se: f64,
    /// Mean of `(FDP − α)²`.
    pub mse_fdp: f64,
    pub mse_fdp_se: f64,
    pub replications: usize,
    pub failures: usize,
    #[serde(skip)]
    pub fdps: Vec<f64>,
}

/// Output of [`run_testing_setting`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdrReport {
    pub config: SettingConfig,
    pub swept_parameter: String,
    pub rows: Vec<FdrRow>,
}

impl FdrReport {
    pub fn row(&self, estimator: TestingEstimator, grid_index: usize) -> Option<&FdrRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.grid_index == grid_index)
    }
}

fn replicate_fdp(
    cfg: &SettingConfig,
    sc: &Scenario,
    procedure: Procedure,
    estimators: &[TestingEstimator],
    grid: usize,
    rep: usize,
) -> Result<Vec<Option<f64>>> {
    let sample = draw(cfg, sc, grid, rep)?;
    let truth = sc.spec.null;
    let mut cj: Option<Option<(NullParams<f64>, ProportionEstimate<f64>)>> = None;
    let mut efron: Option<Option<(NullParams<f64>, ProportionEstimate<f64>)>> = None;
    let needs_density = procedure == Procedure::Adaptz;
    let density = if needs_density {
        kde(&sample, &cfg.kde).ok()
    } else {
        None
    };
    let pvals = (procedure == Procedure::AdaptiveBh).then(|| pvalues_from_null(&sample, &truth));

    let mut out = Vec::with_capacity(estimators.len());
    for &est in estimators {
        let inputs = match est {
            TestingEstimator::Cj => *cj.get_or_insert_with(|| {
                if cfg.setting.null_known() {
                    estimate_eps_with_null(&sample, sc.gamma, &truth).ok().map(|e| (truth, e))
                } else {
                    estimate_eps_plugin_detailed(&sample, sc.gamma)
                        .ok()
                        .map(|(n, e)| (n.params, e))
                }
            }),
            TestingEstimator::Efron => *efron.get_or_insert_with(|| efron_estimator(&sample).ok()),
            TestingEstimator::Storey => {
                let p = pvals.clone().unwrap_or_else(|| pvalues_from_null(&sample, &truth));
                storey_estimator(&p, cfg.storey_lambda).ok().map(|e| (truth, e))
            }
            TestingEstimator::Oracle => Some((truth, ProportionEstimate::known(sc.spec.eps))),
        };
        let fdp = inputs.and_then(|(null, eps)| {
            let rej = match procedure {
                Procedure::AdaptiveBh => adaptive_bh(pvals.as_ref()?, cfg.alpha, &eps).ok()?,
                Procedure::Adaptz => adaptz(&sample, cfg.alpha, &eps, &null, density.as_ref()?).ok()?,
            };
            evaluate_fdp_on(&rej, &sample).ok()
        });
        out.push(fdp);
    }
    Ok(out)
}

/// Empirical FDR and MSE of the FDP around the nominal level.
pub fn run_testing_setting(
    cfg: &SettingConfig,
    procedure: Procedure,
    estimators: &[TestingEstimator],
) -> Result<FdrReport> {
    cfg.validate()?;
    if !cfg.setting.is_testing() {
        return Err(invalid(format!("setting {} is not a testing setting", cfg.setting)));
    }
    if estimators.is_empty() {
        return Err(invalid("no estimators requested"));
    }
    if procedure == Procedure::Adaptz && estimators.contains(&TestingEstimator::Storey) {
        return Err(invalid("Storey's estimator provides no null estimate for AdaptZ"));
    }
    let scenarios: Vec<Scenario> = cfg.grid.iter().map(|&g| cfg.scenario(g)).collect::<Result<_>>()?;
    let results = run_tasks(cfg, |g, r| replicate_fdp(cfg, &scenarios[g], procedure, estimators, g, r))?;

    let mut rows = Vec::new();
    for (g, reps) in results.iter().enumerate() {
        for (j, &est) in estimators.iter().enumerate() {
            let fdps: Vec<f64> = reps.iter().filter_map(|r| r[j]).collect();
            let failures = reps.len() - fdps.len();
            let (fdr, fdr_se) = mean_and_se(&fdps);
            let dev: Vec<f64> = fdps.iter().map(|f| (f - cfg.alpha) * (f - cfg.alpha)).collect();
            let (mse_fdp, mse_fdp_se) = mean_and_se(&dev);
            rows.push(FdrRow {
                grid_index: g,
                grid_value: cfg.grid[g],
                procedure,
                estimator: est,
                fdr,
                fdr_se,
                mse_fdp,
                mse_fdp_se,
                replications: fdps.len(),
                failures,
                fdps,
            });
        }
    }
    Ok(FdrReport {
        config: cfg.clone(),
        swept_parameter: cfg.setting.swept_parameter().to_string(),
        rows,
    })
}
