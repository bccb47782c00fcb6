//! Least-favorable density pairs for the minimax lower bounds and numerical
//! checks of their properties.
//!
//! Each pair is built from a base perturbation `w₁` (zero mass, heavy
//! tailed) and a partner `w₂` whose spectrum is chosen so the two mixture
//! densities share their characteristic function on `|t| ≤ τₙ + 1/3`.
//! Spatial functions are obtained by Gauss–Legendre inversion of the closed
//! form spectra; the difference of the two densities is inverted from its own
//! spectrum so it keeps full relative precision.

mod cutoff;
mod pair;
mod params;
mod transform;
mod verify;

pub use cutoff::{ramp, smooth_cutoff_s1, smooth_cutoff_s2, xi_base};
pub use pair::{
    build_pair, DensityPair, PairKind, PairOptions, FREQ_MARGIN, FREQ_STEPS_LOG2, MAX_HALVINGS, NONNEG_TOL,
    U_MAX, U_STEP, X_SPREAD, X_STEP,
};
pub use params::{normal_abs_moment, SpaceParams};
pub use transform::{forward_transform, power_tail_cos};
pub use verify::{
    chi2_decay, chi2_details, chi2_distance, expected_delta, lower_bound_report, verify_low_freq_match,
    verify_pair, verify_tail, Check, Chi2Decay, Chi2Report, LowFreqReport, LowerBoundReport, TailReport,
    DECAY_NS, LOW_FREQ_TOL, MASS_TOL, N_CHI2_BOUND, ROUNDTRIP_FREQS, ROUNDTRIP_TOL, TAIL_BAND, TAIL_SLOPE,
    W1_ZERO_TOL,
};
