//! TOML experiment configuration and config hashing.
//!
//! ```toml
//! workers = 4
//!
//! [estimate]
//! input = "z.csv"
//! gamma = 0.2
//! null = { mode = "known", u0 = 0.0, sigma0 = 1.0 }   # or { mode = "estimate" }
//!
//! [simulate]
//! setting = "3a"
//! replications = 200
//! seed = 7
//! grid = [0.03, 0.3]
//!
//! [reproduce]
//! target = "table3"
//! scale = 0.2
//! seed = 1
//!
//! [lowerbound]
//! kind = "variance"
//! n = 10000
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kde::BandwidthRule;
use crate::least_favorable::PairKind;
use crate::sim::{ReproduceTarget, SettingId};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub workers: Option<usize>,
    pub estimate: Option<EstimateConfig>,
    pub simulate: Option<SimulateConfig>,
    pub reproduce: Option<ReproduceSection>,
    pub lowerbound: Option<LowerBoundConfig>,
}

/// How `estimate` obtains the null.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum NullMode {
    Known { u0: f64, sigma0: f64 },
    Estimate,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub input: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub null: Option<NullMode>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub setting: SettingId,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub n: Option<usize>,
    pub grid: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub storey_lambda: Option<f64>,
    pub kde: Option<BandwidthRule>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceSection {
    pub target: ReproduceTarget,
    pub seed: Option<u64>,
    pub scale: Option<f64>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundConfig {
    pub kind: Option<PairKind>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub eps0: Option<f64>,
    pub q: Option<f64>,
    pub a: Option<f64>,
    pub big_a: Option<f64>,
    pub n: Option<u64>,
    pub vartheta0: Option<f64>,
    pub theta0: Option<f64>,
    pub low_freq_tol: Option<f64>,
    pub output: Option<PathBuf>,
}

/// Parses a TOML document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Reads and parses a TOML file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Hex SHA-256 of the JSON serialisation of `value`.
pub fn config_hash<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
