use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};

use crate::error::{invalid, Result};
use crate::sample::Sample;

use super::mixture::{MixtureSpec, NonNullLaw, UniformLaw};

/// Generator for replication `rep` at grid point `grid` of a run seeded with
/// `master`. Each pair gets its own ChaCha stream, so draws never overlap and
/// do not depend on scheduling.
pub fn replication_rng(master: u64, grid: u32, rep: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((u64::from(grid) << 32) | u64::from(rep));
    rng
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, law: UniformLaw) -> f64 {
    law.lo + (law.hi - law.lo) * rng.random::<f64>()
}

fn laplace<R: Rng + ?Sized>(rng: &mut R, mu: f64, tau: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    if u < 0.5 {
        mu + tau * (2.0 * u).ln()
    } else {
        mu - tau * (2.0 * (1.0 - u)).ln()
    }
}

fn draw_nonnull<R: Rng + ?Sized>(rng: &mut R, law: NonNullLaw) -> f64 {
    match law {
        NonNullLaw::GaussianTwoComponent { mu1, mu2, sigma } => {
            let first = rng.random::<f64>() < 0.5;
            let mu = uniform(rng, if first { mu1 } else { mu2 });
            let z: f64 = rng.sample(StandardNormal);
            mu + sigma * z
        }
        NonNullLaw::DoubleExpTwoComponent { mu1, mu2, tau } => {
            let first = rng.random::<f64>() < 0.5;
            let mu = uniform(rng, if first { mu1 } else { mu2 });
            laplace(rng, mu, tau)
        }
        NonNullLaw::PointMass { u, sigma } => {
            let z: f64 = rng.sample(StandardNormal);
            u + sigma * z
        }
    }
}

/// Independent draws from the mixture, any nonnull law.
pub fn sample_mixture<R: Rng + ?Sized>(spec: &MixtureSpec, n: usize, rng: &mut R) -> Result<Sample<f64>> {
    if n == 0 {
        return Err(invalid("sample size must be positive"));
    }
    let mut values = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for _ in 0..n {
        let nonnull = rng.random::<f64>() < spec.eps;
        let x = if nonnull {
            draw_nonnull(rng, spec.nonnull)
        } else {
            let z: f64 = rng.sample(StandardNormal);
            spec.null.u0 + spec.null.sigma0 * z
        };
        values.push(x);
        truth.push(nonnull);
    }
    Sample::with_truth(values, truth)
}

/// Gaussian two-component mixture draws.
pub fn gen_gaussian_mixture(spec: &MixtureSpec, n: usize, seed: u64) -> Result<Sample<f64>> {
    if !matches!(spec.nonnull, NonNullLaw::GaussianTwoComponent { .. }) {
        return Err(invalid("expected a Gaussian two-component spec"));
    }
    sample_mixture(spec, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Laplace two-component mixture draws; Laplace variates by inverse CDF.
pub fn gen_double_exp_mixture(spec: &MixtureSpec, n: usize, seed: u64) -> Result<Sample<f64>> {
    if !matches!(spec.nonnull, NonNullLaw::DoubleExpTwoComponent { .. }) {
        return Err(invalid("expected a double-exponential two-component spec"));
    }
    sample_mixture(spec, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Block sizes of the (null, first nonnull, second nonnull) runs.
pub fn block_split(n: usize, eps: f64) -> (usize, usize, usize) {
    let nulls = ((1.0 - eps) * n as f64).round() as usize;
    let nulls = nulls.min(n);
    let first = ((n - nulls) as f64 / 2.0).round() as usize;
    (nulls, first, n - nulls - first)
}

/// Moving-average noise `z_j = (L + 1)^(−1/2) Σ_{l=j}^{j+L} w_l`.
pub fn moving_average_noise<R: Rng + ?Sized>(n: usize, block: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n + block).map(|_| rng.sample(StandardNormal)).collect();
    let scale = 1.0 / ((block + 1) as f64).sqrt();
    (0..n)
        .map(|j| w[j..=j + block].iter().sum::<f64>() * scale)
        .collect()
}

/// Block-dependent draws: positions are split into a null run followed by
/// the two nonnull components, all driven by moving-average noise.
pub fn sample_block_dependent<R: Rng + ?Sized>(
    spec: &MixtureSpec,
    n: usize,
    block: usize,
    rng: &mut R,
) -> Result<Sample<f64>> {
    let NonNullLaw::GaussianTwoComponent { mu1, mu2, sigma } = spec.nonnull else {
        return Err(invalid("block-dependent data need a Gaussian two-component spec"));
    };
    if n == 0 {
        return Err(invalid("sample size must be positive"));
    }
    let z = moving_average_noise(n, block, rng);
    let (nulls, first, _) = block_split(n, spec.eps);
    let mut values = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for (i, &zi) in z.iter().enumerate() {
        if i < nulls {
            values.push(spec.null.u0 + spec.null.sigma0 * zi);
            truth.push(false);
        } else {
            let law = if i < nulls + first { mu1 } else { mu2 };
            values.push(uniform(rng, law) + sigma * zi);
            truth.push(true);
        }
    }
    Sample::with_truth(values, truth)
}

/// Block-dependent draws from a seed.
pub fn gen_block_dependent(spec: &MixtureSpec, n: usize, block: usize, seed: u64) -> Result<Sample<f64>> {
    sample_block_dependent(spec, n, block, &mut ChaCha8Rng::seed_from_u64(seed))
}
