use std::collections::BTreeMap;

use empnull::config::{config_hash, load_config, parse_config, ExperimentConfig, NullMode};
use empnull::least_favorable::PairKind;
use empnull::sim::{ReproduceTarget, SettingId};
use empnull::{BandwidthRule, Error};

const FULL: &str = r#"
workers = 4

[estimate]
input = "z.csv"
gamma = 0.2
null = { mode = "known", u0 = 0.0, sigma0 = 1.0 }

[simulate]
setting = "3a"
replications = 200
seed = 7
grid = [0.03, 0.3]
kde = "silverman"

[reproduce]
target = "table3"
scale = 0.2
seed = 1

[lowerbound]
kind = "mean"
n = 10000
"#;

#[test]
fn parses_every_section() {
    let cfg = parse_config(FULL).unwrap();
    assert_eq!(cfg.workers, Some(4));
    let est = cfg.estimate.unwrap();
    assert_eq!(est.null, Some(NullMode::Known { u0: 0.0, sigma0: 1.0 }));
    assert_eq!(est.gamma, Some(0.2));
    let sim = cfg.simulate.unwrap();
    assert_eq!(sim.setting, SettingId::S3a);
    assert_eq!(sim.grid, Some(vec![0.03, 0.3]));
    assert_eq!(sim.kde, Some(BandwidthRule::Silverman));
    let rep = cfg.reproduce.unwrap();
    assert_eq!(rep.target, ReproduceTarget::Table3);
    assert_eq!(rep.scale, Some(0.2));
    let lb = cfg.lowerbound.unwrap();
    assert_eq!(lb.kind, Some(PairKind::Mean));
    assert_eq!(lb.n, Some(10_000));
}

#[test]
fn empty_document_is_the_default() {
    assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
    let cfg = parse_config("[estimate]\nnull = { mode = \"estimate\" }\n").unwrap();
    assert_eq!(cfg.estimate.unwrap().null, Some(NullMode::Estimate));
}

#[test]
fn unknown_keys_are_rejected() {
    for doc in [
        "threads = 2",
        "[estimate]\ngama = 0.2",
        "[simulate]\nsetting = \"1\"\nreps = 3",
        "[estimate]\nnull = { mode = \"known\", u0 = 0.0, sigma0 = 1.0, extra = 1 }",
        "[lowerbound]\nkind = \"variance\"\ntau = 2.0",
        "[plot]\nx = 1",
    ] {
        assert!(matches!(parse_config(doc), Err(Error::Config(_))), "{doc}");
    }
}

#[test]
fn bad_values_are_rejected() {
    assert!(parse_config("[simulate]\nsetting = \"6\"").is_err());
    assert!(parse_config("[reproduce]\ntarget = \"table9\"").is_err());
    assert!(parse_config("[lowerbound]\nkind = \"skew\"").is_err());
    assert!(parse_config("workers = \"four\"").is_err());
}

#[test]
fn load_reports_missing_files() {
    let err = load_config(std::path::Path::new("/nonexistent/empnull.toml")).unwrap_err();
    assert!(matches!(err, Error::Config(ref m) if m.contains("/nonexistent/empnull.toml")));
}

#[test]
fn hash_is_sha256_of_compact_json() {
    let mut m = BTreeMap::new();
    m.insert("a", 1);
    assert_eq!(
        config_hash(&m).unwrap(),
        "015abd7f5cc57a2dd94b7590f04ad8084273905ee33ec5cebeae62276a97f862"
    );
    assert_eq!(
        config_hash(&ExperimentConfig::default().estimate).unwrap(),
        "74234e98afe7498fb5daf1f36ac2d78acc339464f950703b8c019892f982b90b"
    );
    let a = parse_config(FULL).unwrap();
    let mut b = a.clone();
    assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    b.workers = Some(5);
    assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
}
