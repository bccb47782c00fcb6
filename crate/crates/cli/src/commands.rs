use std::path::{Path, PathBuf};
use std::process::ExitCode;

use empnull::config::{
    config_hash, load_config, EstimateConfig, ExperimentConfig, LowerBoundConfig, NullMode, ReproduceSection,
    SimulateConfig,
};
use empnull::least_favorable::{lower_bound_report, PairKind, PairOptions, SpaceParams, DECAY_NS, LOW_FREQ_TOL};
use empnull::sim::{
    provenance_json, reproduce, run_setting, run_testing_setting, testing_plan, AnyReport, CsvTable, SettingConfig,
};
use empnull::{
    estimate_eps_known_null, estimate_eps_plugin_detailed, estimate_eps_with_null, Error, NullParams64, Result,
    DEFAULT_GAMMA,
};
use serde_json::json;

use crate::input::read_z_scores;
use crate::{Cli, Command, EstimateArgs, LowerBoundArgs, NullChoice, ReproduceArgs, SimulateArgs};

pub const DEFAULT_SEED: u64 = 1;

pub fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(workers) = cli.workers.or(cfg.workers) {
        if workers == 0 {
            return Err(Error::InvalidInput("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("cannot start {workers} workers: {e}")))?;
    }
    match cli.command {
        Command::Estimate(args) => estimate(args, cfg.estimate.unwrap_or_default()),
        Command::Simulate(args) => simulate(args, cfg.simulate),
        Command::Reproduce(args) => reproduce_cmd(args, cfg.reproduce),
        Command::Lowerbound(args) => lowerbound(args, cfg.lowerbound.unwrap_or_default()),
    }
}

fn resolve_null(args: &EstimateArgs, file: Option<NullMode>) -> NullMode {
    match (args.u0, args.sigma0, args.null) {
        (Some(u0), Some(sigma0), _) => NullMode::Known { u0, sigma0 },
        (_, _, Some(NullChoice::Estimate)) => NullMode::Estimate,
        (_, _, Some(NullChoice::Known)) => match file {
            Some(known @ NullMode::Known { .. }) => known,
            _ => NullMode::Known { u0: 0.0, sigma0: 1.0 },
        },
        _ => file.unwrap_or(NullMode::Estimate),
    }
}

fn estimate(args: EstimateArgs, file: EstimateConfig) -> Result<ExitCode> {
    let resolved = EstimateConfig {
        input: args.input.clone().or(file.input),
        gamma: Some(args.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA)),
        null: Some(resolve_null(&args, file.null)),
        output: args.output.clone().or(file.output),
    };
    let input = resolved
        .input
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("no input file given".into()))?;
    let gamma = resolved.gamma.unwrap_or(DEFAULT_GAMMA);
    let sample = read_z_scores(input)?;

    let (params, eps, t_hat) = match resolved.null.unwrap_or(NullMode::Estimate) {
        NullMode::Known { u0, sigma0 } => {
            let null = NullParams64::new(u0, sigma0)?;
            let eps = if u0 == 0.0 && sigma0 == 1.0 {
                estimate_eps_known_null(&sample, gamma)?
            } else {
                estimate_eps_with_null(&sample, gamma, &null)?
            };
            (null, eps, None)
        }
        NullMode::Estimate => {
            let (null, eps) = estimate_eps_plugin_detailed(&sample, gamma)?;
            (null.params, eps, Some(null.threshold.t_hat))
        }
    };
    let doc = json!({
        "tool": "empnull",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "estimate",
        "config": &resolved,
        "config_hash": config_hash(&resolved)?,
        "n": sample.len(),
        "gamma": gamma,
        "null_estimated": t_hat.is_some(),
        "u0_hat": params.u0,
        "sigma0_hat": params.sigma0,
        "sigma0_sq_hat": params.sigma0 * params.sigma0,
        "t_hat": t_hat,
        "eps_raw": eps.raw,
        "eps_clamped": eps.clamped,
        "eps_frequency": eps.t_used,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit_json(resolved.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn simulate(args: SimulateArgs, file: Option<SimulateConfig>) -> Result<ExitCode> {
    let setting = args
        .setting
        .or(file.as_ref().map(|f| f.setting))
        .ok_or_else(|| Error::InvalidInput("no setting given".into()))?;
    let file = file.filter(|f| f.setting == setting);
    let pick = |flag: Option<f64>, from_file: fn(&SimulateConfig) -> Option<f64>| {
        flag.or_else(|| file.as_ref().and_then(from_file))
    };
    let seed = args
        .seed
        .or_else(|| file.as_ref().and_then(|f| f.seed))
        .unwrap_or(DEFAULT_SEED);
    let paper = SettingConfig::paper(setting, seed);
    let cfg = SettingConfig {
        n: args.n.or_else(|| file.as_ref().and_then(|f| f.n)).unwrap_or(paper.n),
        replications: args
            .replications
            .or_else(|| file.as_ref().and_then(|f| f.replications))
            .unwrap_or(paper.replications),
        gamma: pick(args.gamma, |f| f.gamma).unwrap_or(paper.gamma),
        grid: args
            .grid
            .clone()
            .or_else(|| file.as_ref().and_then(|f| f.grid.clone()))
            .unwrap_or_else(|| paper.grid.clone()),
        alpha: pick(None, |f| f.alpha).unwrap_or(paper.alpha),
        storey_lambda: pick(None, |f| f.storey_lambda).unwrap_or(paper.storey_lambda),
        kde: file.as_ref().and_then(|f| f.kde.clone()).unwrap_or(paper.kde),
        ..paper
    };
    let output = args.output.or_else(|| file.and_then(|f| f.output));

    let mut table = CsvTable::new()?;
    let name = format!("setting{setting}");
    let json = if setting.is_testing() {
        let (procedure, estimators) = testing_plan(setting);
        let report = run_testing_setting(&cfg, procedure, estimators)?;
        table.push_fdr(&name, &report)?;
        provenance_json("simulate", &cfg, seed, vec![AnyReport::Fdr(&report)])?
    } else {
        let report = run_setting(&cfg)?;
        table.push_mse(&name, &report, true)?;
        provenance_json("simulate", &cfg, seed, vec![AnyReport::Mse(&report)])?
    };
    emit_csv(output.as_deref(), &table.finish()?, &json)?;
    Ok(ExitCode::SUCCESS)
}

fn reproduce_cmd(args: ReproduceArgs, file: Option<ReproduceSection>) -> Result<ExitCode> {
    let target = args
        .target
        .or(file.as_ref().map(|f| f.target))
        .ok_or_else(|| Error::InvalidInput("no reproduce target given".into()))?;
    let file = file.filter(|f| f.target == target);
    let seed = args
        .seed
        .or_else(|| file.as_ref().and_then(|f| f.seed))
        .unwrap_or(DEFAULT_SEED);
    let scale = args.scale.or_else(|| file.as_ref().and_then(|f| f.scale)).unwrap_or(1.0);
    let output = args.output.or_else(|| file.and_then(|f| f.output));
    let out = reproduce(target, seed, scale)?;
    emit_csv(output.as_deref(), &out.csv, &out.json)?;
    Ok(ExitCode::SUCCESS)
}

fn lowerbound(args: LowerBoundArgs, file: LowerBoundConfig) -> Result<ExitCode> {
    let kind = args.kind.or(file.kind).unwrap_or(PairKind::Variance);
    let n = args.n.or(file.n).unwrap_or(10_000);
    let standard = SpaceParams::standard(n);
    let params = SpaceParams {
        alpha: args.alpha.or(file.alpha).unwrap_or(standard.alpha),
        beta: args.beta.or(file.beta).unwrap_or(standard.beta),
        eps0: args.eps0.or(file.eps0).unwrap_or(standard.eps0),
        q: args.q.or(file.q).unwrap_or(standard.q),
        a: args.a.or(file.a).unwrap_or(standard.a),
        big_a: args.big_a.or(file.big_a).unwrap_or(standard.big_a),
        n,
    };
    params.validate()?;
    let defaults = PairOptions::default();
    let options = PairOptions {
        vartheta0: args.vartheta0.or(file.vartheta0).unwrap_or(defaults.vartheta0),
        theta0: args.theta0.or(file.theta0).unwrap_or(defaults.theta0),
        ..defaults
    };
    let tol = args.low_freq_tol.or(file.low_freq_tol).unwrap_or(LOW_FREQ_TOL);
    let report = lower_bound_report(kind, &params, options, tol, &DECAY_NS)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit_json(args.output.or(file.output).as_deref(), &text)?;
    for check in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "check failed: {} = {:.3e} (tolerance {:.3e})",
            check.name, check.value, check.tolerance
        );
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn emit_json(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Writes the CSV to `path` and the provenance next to it with a `.json`
/// extension. Without a path the CSV goes to stdout and the provenance is
/// dropped.
fn emit_csv(path: Option<&Path>, csv: &str, json: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, csv)?;
            std::fs::write(json_sibling(p), json)?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn json_sibling(path: &Path) -> PathBuf {
    let mut out = path.to_path_buf();
    out.set_extension("json");
    if out == path {
        out.set_extension("json.json");
    }
    out
}
