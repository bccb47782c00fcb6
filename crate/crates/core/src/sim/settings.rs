use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kde::BandwidthRule;
use crate::null_estimation::{NullParams, DEFAULT_GAMMA};

use super::mixture::MixtureSpec;

/// Simulation settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SettingId {
    #[serde(rename = "1")]
    S1,
    #[serde(rename = "2")]
    S2,
    #[serde(rename = "3a")]
    S3a,
    #[serde(rename = "3b")]
    S3b,
    #[serde(rename = "4a")]
    S4a,
    #[serde(rename = "4b")]
    S4b,
    #[serde(rename = "4c")]
    S4c,
    #[serde(rename = "5a")]
    S5a,
    #[serde(rename = "5b")]
    S5b,
    #[serde(rename = "5c")]
    S5c,
}

impl SettingId {
    pub const ALL: [SettingId; 10] = [
        Self::S1,
        Self::S2,
        Self::S3a,
        Self::S3b,
        Self::S4a,
        Self::S4b,
        Self::S4c,
        Self::S5a,
        Self::S5b,
        Self::S5c,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::S1 => "1",
            Self::S2 => "2",
            Self::S3a => "3a",
            Self::S3b => "3b",
            Self::S4a => "4a",
            Self::S4b => "4b",
            Self::S4c => "4c",
            Self::S5a => "5a",
            Self::S5b => "5b",
            Self::S5c => "5c",
        }
    }

    /// Name of the swept parameter.
    pub fn swept_parameter(&self) -> &'static str {
        match self {
            Self::S1 => "gamma",
            Self::S2 => "n",
            Self::S3a | Self::S4a | Self::S5a => "eps",
            Self::S3b | Self::S5b => "sigma",
            Self::S4b => "tau",
            Self::S4c => "block_length",
            Self::S5c => "sigma0",
        }
    }

    /// The published grid of the swept parameter.
    pub fn paper_grid(&self) -> Vec<f64> {
        match self {
            Self::S1 => GAMMA_GRID.to_vec(),
            Self::S2 => N_GRID.to_vec(),
            Self::S3a | Self::S4a | Self::S5a => EPS_GRID.to_vec(),
            Self::S3b | Self::S5b => SCALE_GRID.to_vec(),
            Self::S4b => SCALE_GRID.to_vec(),
            Self::S4c => BLOCK_GRID.to_vec(),
            Self::S5c => SIGMA0_GRID.to_vec(),
        }
    }

    /// Settings whose output is an FDR/FDP report.
    pub fn is_testing(&self) -> bool {
        matches!(self, Self::S5a | Self::S5b | Self::S5c)
    }

    /// Whether the proportion estimator is given the true null.
    pub fn null_known(&self) -> bool {
        matches!(self, Self::S3a | Self::S4a | Self::S5a)
    }
}

impl fmt::Display for SettingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SettingId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown setting '{s}'")))
    }
}

pub const GAMMA_GRID: [f64; 11] = [0.08, 0.11, 0.14, 0.17, 0.20, 0.23, 0.26, 0.29, 0.32, 0.35, 0.38];
pub const N_GRID: [f64; 8] = [2000.0, 5000.0, 10000.0, 15000.0, 20000.0, 50000.0, 100000.0, 500000.0];
pub const EPS_GRID: [f64; 10] = [0.03, 0.06, 0.09, 0.12, 0.15, 0.18, 0.21, 0.24, 0.27, 0.30];
pub const SCALE_GRID: [f64; 10] = [1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0, 2.1];
pub const BLOCK_GRID: [f64; 6] = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0];
pub const SIGMA0_GRID: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Replications per grid point in the published study.
pub const PAPER_REPLICATIONS: usize = 1000;
/// Sample size of every setting except the `n` sweep.
pub const PAPER_N: usize = 10_000;
/// Nominal FDR level of the testing settings.
pub const NOMINAL_FDR: f64 = 0.10;

/// One simulation study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingConfig {
    pub setting: SettingId,
    pub n: usize,
    pub replications: usize,
    pub gamma: f64,
    pub grid: Vec<f64>,
    pub master_seed: u64,
    pub alpha: f64,
    pub storey_lambda: f64,
    pub kde: BandwidthRule,
}

/// Model, sample size and block length for one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub spec: MixtureSpec,
    pub n: usize,
    pub gamma: f64,
    pub block: Option<usize>,
}

impl SettingConfig {
    /// The published configuration of a setting.
    pub fn paper(setting: SettingId, master_seed: u64) -> Self {
        Self {
            setting,
            n: PAPER_N,
            replications: PAPER_REPLICATIONS,
            gamma: DEFAULT_GAMMA,
            grid: setting.paper_grid(),
            master_seed,
            alpha: NOMINAL_FDR,
            storey_lambda: crate::baseline::DEFAULT_STOREY_LAMBDA,
            kde: BandwidthRule::LooCvDefault,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(invalid("replications must be positive"));
        }
        if self.grid.is_empty() {
            return Err(invalid("grid is empty"));
        }
        if self.grid.len() > u32::MAX as usize || self.replications > u32::MAX as usize {
            return Err(invalid("grid or replication count too large"));
        }
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return Err(invalid(format!("gamma must lie in (0, 1/2), got {}", self.gamma)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid("alpha must lie in (0, 1)"));
        }
        if !(self.storey_lambda > 0.0 && self.storey_lambda < 1.0) {
            return Err(invalid("storey_lambda must lie in (0, 1)"));
        }
        if self.n < 2 && self.setting != SettingId::S2 {
            return Err(invalid("n must be at least 2"));
        }
        for &g in &self.grid {
            self.scenario(g)?;
        }
        Ok(())
    }

    /// Resolves a grid value into a concrete scenario.
    pub fn scenario(&self, value: f64) -> Result<Scenario> {
        let std_null = NullParams::standard();
        let mut gamma = self.gamma;
        let mut n = self.n;
        let mut block = None;
        let spec = match self.setting {
            SettingId::S1 => {
                gamma = value;
                if !(gamma > 0.0 && gamma < 0.5) {
                    return Err(invalid(format!("gamma grid value {value} outside (0, 1/2)")));
                }
                MixtureSpec::gaussian(0.2, std_null, 1.2)?
            }
            SettingId::S2 => {
                if !(value >= 2.0 && value.fract() == 0.0) {
                    return Err(invalid(format!("n grid value {value} is not an integer >= 2")));
                }
                n = value as usize;
                MixtureSpec::gaussian(0.2, std_null, 1.2)?
            }
            SettingId::S3a | SettingId::S5a => MixtureSpec::gaussian(value, std_null, 1.2)?,
            SettingId::S3b | SettingId::S5b => MixtureSpec::gaussian(0.2, std_null, value)?,
            SettingId::S4a => MixtureSpec::double_exp(value, std_null, 1.2)?,
            SettingId::S4b => MixtureSpec::double_exp(0.2, std_null, value)?,
            SettingId::S4c => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(invalid(format!("block length {value} is not a nonnegative integer")));
                }
                block = Some(value as usize);
                MixtureSpec::gaussian(0.2, std_null, 1.2)?
            }
            SettingId::S5c => MixtureSpec::gaussian(0.2, NullParams::new(0.0, value)?, 1.3)?,
        };
        Ok(Scenario {
            spec,
            n,
            gamma,
            block,
        })
    }
}
