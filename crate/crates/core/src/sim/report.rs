use serde::Serialize;

use crate::config::config_hash;
use crate::error::Result;

use super::harness::{FdrReport, MseReport};
use super::published::published_mse;

pub const CSV_HEADER: [&str; 12] = [
    "target",
    "setting",
    "parameter",
    "grid_value",
    "estimator",
    "procedure",
    "metric",
    "value",
    "se",
    "replications",
    "failures",
    "published",
];

/// Accumulates report rows into one CSV document.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

impl CsvTable {
    pub fn new() -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER)?;
        Ok(Self { writer })
    }

    /// Appends an MSE report; `with_published` adds the published values.
    pub fn push_mse(&mut self, target: &str, report: &MseReport, with_published: bool) -> Result<()> {
        let setting = report.config.setting;
        for r in &report.rows {
            let published = with_published
                .then(|| published_mse(setting, r.estimator, r.grid_value))
                .flatten()
                .map(num)
                .unwrap_or_default();
            self.writer.write_record([
                target,
                setting.as_str(),
                &report.swept_parameter,
                &num(r.grid_value),
                r.estimator.as_str(),
                "",
                "mse",
                &num(r.mse),
                &num(r.se),
                &r.replications.to_string(),
                &r.failures.to_string(),
                &published,
            ])?;
        }
        Ok(())
    }

    /// Appends an FDR report as `fdr` and `mse_fdp` rows.
    pub fn push_fdr(&mut self, target: &str, report: &FdrReport) -> Result<()> {
        let setting = report.config.setting;
        for r in &report.rows {
            for (metric, value, se) in [("fdr", r.fdr, r.fdr_se), ("mse_fdp", r.mse_fdp, r.mse_fdp_se)] {
                self.writer.write_record([
                    target,
                    setting.as_str(),
                    &report.swept_parameter,
                    &num(r.grid_value),
                    r.estimator.as_str(),
                    r.procedure.as_str(),
                    metric,
                    &num(value),
                    &num(se),
                    &r.replications.to_string(),
                    &r.failures.to_string(),
                    "",
                ])?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<String> {
        let bytes = self
            .writer
            .into_inner()
            .map_err(|e| crate::error::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

/// One report inside the provenance document.
#[derive(Serialize)]
#[serde(untagged)]
pub enum AnyReport<'a> {
    Mse(&'a MseReport),
    Fdr(&'a FdrReport),
}

#[derive(Serialize)]
struct Provenance<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    config_hash: String,
    seed: u64,
    reports: Vec<AnyReport<'a>>,
}

/// Pretty JSON with the resolved config, its hash, the seed and the reports.
pub fn provenance_json<C: Serialize>(
    command: &str,
    config: &C,
    seed: u64,
    reports: Vec<AnyReport<'_>>,
) -> Result<String> {
    let doc = Provenance {
        tool: "empnull",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        config_hash: config_hash(config)?,
        seed,
        reports,
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}
