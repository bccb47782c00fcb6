//! Fourier-domain estimation of the empirical null and the nonnull proportion
//! for large-scale z-score problems.
//!
//! The estimators work on the empirical characteristic function of a
//! [`Sample`]: the null mean and variance come from its phase and log-modulus
//! derivative at a data-driven frequency, and the nonnull proportion from a
//! Gaussian-compensated average of its real part. Alongside them sit the
//! usual baselines (Storey, Efron's central matching), FDR procedures that
//! consume the estimates, a seeded simulation harness, and numerical checks of
//! the least-favorable pairs behind the minimax lower bounds.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! simulation harness and lower-bound constructions run in `f64`.
//!
//! ```
//! use empnull::{estimate_eps_plugin, estimate_null, Sample64};
//!
//! let z: Vec<f64> = (0..2000).map(|i| ((i as f64 + 0.5) / 2000.0 - 0.5) * 4.0).collect();
//! let sample = Sample64::new(z).unwrap();
//! let null = estimate_null(&sample, 0.2).unwrap();
//! let eps = estimate_eps_plugin(&sample, 0.2).unwrap();
//! assert!(null.sigma0 > 0.0 && eps.clamped >= 0.0);
//! ```

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod config;
pub mod ecf;
pub mod error;
pub mod kde;
pub mod least_favorable;
pub mod null_estimation;
pub mod proportion;
pub mod quadrature;
pub mod sample;
mod scalar;
pub mod sim;
pub mod testing;

pub use baseline::{
    efron_estimator, normal_cdf, normal_pdf, normal_sf, pvalues_from_null, storey_estimator, PValueVector,
    DEFAULT_STOREY_LAMBDA, EFRON_MIN_N,
};
pub use ecf::{
    deterministic_threshold_freq, ecf_deriv, ecf_eval, threshold_freq, CfHandle, EmpiricalCf, FrequencyThreshold,
    NullComponentCf,
};
pub use error::{Error, Result};
pub use kde::{kde, kde_with_bandwidth, BandwidthRule, DensityEstimate};
pub use null_estimation::{
    estimate_null, estimate_null_detailed, mean_functional, sigma_functional, NullEstimate, NullParams,
    DEFAULT_GAMMA,
};
pub use proportion::{
    estimate_eps_known_null, estimate_eps_plugin, estimate_eps_plugin_detailed, estimate_eps_with_null,
    phase_function_estimator, point_mass_frequency, ProportionEstimate, WeightDensity,
};
pub use sample::Sample;
pub use scalar::Real;
pub use testing::{
    adaptive_bh, adaptz, adaptz_from_lfdr, bh_stepup, evaluate_fdp, evaluate_fdp_on, lfdr_values, RejectionSet,
    TestingOutcome,
};

pub type Sample64 = Sample<f64>;
pub type Sample32 = Sample<f32>;
pub type NullParams64 = NullParams<f64>;
pub type NullParams32 = NullParams<f32>;
pub type NullEstimate64 = NullEstimate<f64>;
pub type ProportionEstimate64 = ProportionEstimate<f64>;
pub type ProportionEstimate32 = ProportionEstimate<f32>;
pub type PValues64 = PValueVector<f64>;
pub type DensityEstimate64 = DensityEstimate<f64>;
pub type FrequencyThreshold64 = FrequencyThreshold<f64>;
