use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::harness::{run_setting, run_testing_setting, FdrReport, MseReport, Procedure, TestingEstimator};
use super::report::{provenance_json, AnyReport, CsvTable};
use super::settings::{SettingConfig, SettingId, PAPER_REPLICATIONS};

/// Published tables and figures that can be regenerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReproduceTarget {
    Table1,
    Table2,
    Table3,
    Table4a,
    Table4b,
    /// Setting 4c; the same study as `Table5`.
    Table4c,
    Table5,
    Fig2,
    Fig3,
}

impl ReproduceTarget {
    pub const ALL: [ReproduceTarget; 9] = [
        Self::Table1,
        Self::Table2,
        Self::Table3,
        Self::Table4a,
        Self::Table4b,
        Self::Table4c,
        Self::Table5,
        Self::Fig2,
        Self::Fig3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::Table2 => "table2",
            Self::Table3 => "table3",
            Self::Table4a => "table4a",
            Self::Table4b => "table4b",
            Self::Table4c => "table4c",
            Self::Table5 => "table5",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
        }
    }

    /// Settings run for this target.
    pub fn settings(&self) -> &'static [SettingId] {
        match self {
            Self::Table1 => &[SettingId::S1],
            Self::Table2 => &[SettingId::S2],
            Self::Table3 => &[SettingId::S3a, SettingId::S3b],
            Self::Table4a => &[SettingId::S4a],
            Self::Table4b => &[SettingId::S4b],
            Self::Table4c | Self::Table5 => &[SettingId::S4c],
            Self::Fig2 => &[SettingId::S5a, SettingId::S5b],
            Self::Fig3 => &[SettingId::S5c],
        }
    }
}

impl fmt::Display for ReproduceTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReproduceTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown reproduce target '{s}'")))
    }
}

/// Replications at a given scale, never fewer than two.
pub fn scaled_replications(scale: f64) -> Result<usize> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(invalid(format!("scale must lie in (0, 1], got {scale}")));
    }
    Ok(((PAPER_REPLICATIONS as f64 * scale).round() as usize).max(2))
}

/// Resolved reproduce request, recorded in the provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproduceConfig {
    pub target: ReproduceTarget,
    pub seed: u64,
    pub scale: f64,
    pub settings: Vec<SettingConfig>,
}

/// CSV table and JSON provenance of a reproduce run.
#[derive(Clone, Debug, PartialEq)]
pub struct ReproduceOutput {
    pub csv: String,
    pub json: String,
}

/// Procedure and estimators compared in a testing setting.
pub fn testing_plan(setting: SettingId) -> (Procedure, &'static [TestingEstimator]) {
    match setting {
        SettingId::S5c => (Procedure::Adaptz, &[TestingEstimator::Cj, TestingEstimator::Efron]),
        _ => (
            Procedure::AdaptiveBh,
            &[TestingEstimator::Cj, TestingEstimator::Storey, TestingEstimator::Efron],
        ),
    }
}

/// Regenerates a published table or figure.
pub fn reproduce(target: ReproduceTarget, seed: u64, scale: f64) -> Result<ReproduceOutput> {
    let reps = scaled_replications(scale)?;
    let settings: Vec<SettingConfig> = target
        .settings()
        .iter()
        .map(|&s| SettingConfig {
            replications: reps,
            ..SettingConfig::paper(s, seed)
        })
        .collect();

    let mut mse: Vec<MseReport> = Vec::new();
    let mut fdr: Vec<FdrReport> = Vec::new();
    for cfg in &settings {
        if cfg.setting.is_testing() {
            let (procedure, estimators) = testing_plan(cfg.setting);
            fdr.push(run_testing_setting(cfg, procedure, estimators)?);
        } else {
            mse.push(run_setting(cfg)?);
        }
    }

    let mut table = CsvTable::new()?;
    for r in &mse {
        table.push_mse(target.as_str(), r, true)?;
    }
    for r in &fdr {
        table.push_fdr(target.as_str(), r)?;
    }
    let config = ReproduceConfig {
        target,
        seed,
        scale,
        settings,
    };
    let reports = mse
        .iter()
        .map(AnyReport::Mse)
        .chain(fdr.iter().map(AnyReport::Fdr))
        .collect();
    Ok(ReproduceOutput {
        csv: table.finish()?,
        json: provenance_json("reproduce", &config, seed, reports)?,
    })
}
