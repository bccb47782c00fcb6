//! `empnull` command-line front end.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use empnull::least_favorable::PairKind;
use empnull::sim::{ReproduceTarget, SettingId};

#[derive(Parser, Debug)]
#[command(name = "empnull", version, about = "Empirical null and nonnull proportion estimation")]
pub struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel replications.
    #[arg(long, global = true, env = "EMPNULL_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the null and the nonnull proportion from a z-score CSV.
    Estimate(EstimateArgs),
    /// Run one simulation setting.
    Simulate(SimulateArgs),
    /// Regenerate a published table or figure as CSV.
    Reproduce(ReproduceArgs),
    /// Build a least-favorable pair and run its numerical checks.
    Lowerbound(LowerBoundArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NullChoice {
    Known,
    Estimate,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// CSV with one column of z-scores and an optional `z` header.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Use a known null or estimate it from the data.
    #[arg(long, value_enum)]
    pub null: Option<NullChoice>,
    /// Known null mean.
    #[arg(long, requires = "sigma0")]
    pub u0: Option<f64>,
    /// Known null standard deviation.
    #[arg(long, requires = "u0")]
    pub sigma0: Option<f64>,
    /// JSON output path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Setting id: 1, 2, 3a, 3b, 4a, 4b, 4c, 5a, 5b or 5c.
    pub setting: Option<SettingId>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated grid values replacing the setting's default grid.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// CSV output path; the JSON provenance goes next to it.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    pub target: Option<ReproduceTarget>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fraction of the published replication count, in (0, 1].
    #[arg(long)]
    pub scale: Option<f64>,
    /// CSV output path; the JSON provenance goes next to it.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LowerBoundArgs {
    /// variance, mean or proportion.
    #[arg(long)]
    pub kind: Option<PairKind>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub big_a: Option<f64>,
    #[arg(long)]
    pub vartheta0: Option<f64>,
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Tolerance of the low-frequency match check.
    #[arg(long)]
    pub low_freq_tol: Option<f64>,
    /// JSON output path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
