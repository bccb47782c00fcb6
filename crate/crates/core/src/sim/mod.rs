//! Data generators, the simulation settings and the replication harness.

mod generate;
mod harness;
mod mixture;
mod published;
mod report;
mod reproduce;
mod settings;

pub use generate::{
    block_split, gen_block_dependent, gen_double_exp_mixture, gen_gaussian_mixture, moving_average_noise,
    replication_rng, sample_block_dependent, sample_mixture,
};
pub use harness::{
    estimators_for, mean_and_se, run_setting, run_testing_setting, Estimator, FdrReport, FdrRow, MseReport,
    MseRow, Procedure, TestingEstimator,
};
pub use mixture::{model_cf, MixtureSpec, NonNullLaw, UniformLaw, MU1_LAW, MU2_LAW};
pub use published::published_mse;
pub use report::{provenance_json, AnyReport, CsvTable, CSV_HEADER};
pub use reproduce::{
    reproduce, scaled_replications, testing_plan, ReproduceConfig, ReproduceOutput, ReproduceTarget,
};
pub use settings::{
    Scenario, SettingConfig, SettingId, BLOCK_GRID, EPS_GRID, GAMMA_GRID, NOMINAL_FDR, N_GRID, PAPER_N,
    PAPER_REPLICATIONS, SCALE_GRID, SIGMA0_GRID,
};
