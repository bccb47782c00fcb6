use thiserror::Error;

/// Errors raised by estimators, simulations and the lower-bound checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no crossing of level {level:.3e} found below t = {ceiling:.4}")]
    ThresholdNotFound { level: f64, ceiling: f64 },

    #[error("characteristic function modulus {modulus:.3e} at t = {t} is too small")]
    DegenerateModulus { t: f64, modulus: f64 },

    #[error("estimated null variance {value:.6e} is not positive; lower gamma or use more data")]
    NonpositiveVariance { value: f64 },

    #[error("quadrature did not reach relative tolerance {tolerance:.1e} (error estimate {estimate:.3e})")]
    Integration { tolerance: f64, estimate: f64 },

    #[error("central matching diverged: {0}")]
    Divergence(String),

    #[error("proportion estimate {eps} leaves 1 - eps below 1e-6")]
    LevelOverflow { eps: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("density estimate is not positive at sample {index} (x = {x})")]
    DensitySupport { index: usize, x: f64 },

    #[error("perturbed densities still negative after {halvings} halvings of vartheta0")]
    ConstructionFailed { halvings: u32 },

    #[error("nonpositive reference density {value:.3e} at x = {x}")]
    Support { x: f64, value: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
