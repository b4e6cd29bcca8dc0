//! Monte-Carlo estimates of hidden-variable correlations.
//!
//! `λ` is drawn uniformly on `[0, π)`. Draws that fall inside the excluded
//! band are rejected rather than redrawn, so `n_accepted + n_rejected` is
//! always the configured sample count and the rejection rate itself is an
//! observable.
//!
//! Sample `i` always consumes the same two 32-bit words of a ChaCha8 stream
//! keyed by the seed, and each chunk seeks to its own first sample. Results
//! are therefore identical for any chunk size and any number of workers.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lhv::Model;
use crate::{Error, Result};

pub const DEFAULT_CHUNK_SIZE: u64 = 65_536;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub n_samples: u64,
    pub chunk_size: u64,
}

impl SamplerConfig {
    pub fn new(seed: u64, n_samples: u64) -> Self {
        Self {
            seed,
            n_samples,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument("n_samples must be positive".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidArgument("chunk_size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_accepted: u64,
    pub n_rejected: u64,
    pub seed: u64,
}

impl CorrelationEstimate {
    pub fn n_samples(&self) -> u64 {
        self.n_accepted + self.n_rejected
    }

    pub fn rejection_fraction(&self) -> f64 {
        self.n_rejected as f64 / self.n_samples() as f64
    }
}

/// Stream of hidden-variable draws starting at a given sample index.
pub struct LambdaStream {
    rng: ChaCha8Rng,
}

impl LambdaStream {
    pub fn new(seed: u64, start_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // one u64 (two words) per sample
        rng.set_word_pos(2 * start_index as u128);
        Self { rng }
    }

    pub fn next_lambda(&mut self) -> f64 {
        sample_lambda(&mut self.rng)
    }
}

/// Uniform deviate on `[0, π)` built from the top 53 bits of one `u64`.
pub fn sample_lambda<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let unit = rng.gen::<f64>();
    let lambda = unit * PI;
    if lambda < PI {
        lambda
    } else {
        // unreachable for 53-bit units, kept so the range contract holds
        PI - f64::EPSILON
    }
}

/// Product of the two outcomes for relative angle `theta` and hidden angle
/// `lambda`: `-1` below the flip boundary `π - θ`, `+1` at or above it.
pub fn joint_product(theta: f64, lambda: f64) -> f64 {
    if lambda < PI - theta {
        -1.0
    } else {
        1.0
    }
}

/// Whether `lambda` falls inside the band of half-width `b` around the flip.
pub fn excluded(lambda: f64, theta: f64, b: f64) -> bool {
    (lambda - (PI - theta)).abs() < b
}

/// Fraction of `[0, π)` removed by the band at `theta`.
pub fn expected_rejection_fraction(model: &Model, theta: f64) -> f64 {
    let b = model.halfwidth(theta);
    let centre = PI - theta;
    let lo = (centre - b).max(0.0);
    let hi = (centre + b).min(PI);
    (hi - lo).max(0.0) / PI
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    plus: u64,
    minus: u64,
    rejected: u64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            plus: self.plus + other.plus,
            minus: self.minus + other.minus,
            rejected: self.rejected + other.rejected,
        }
    }
}

fn run_chunk(seed: u64, start: u64, len: u64, theta: f64, b: f64) -> Tally {
    let mut stream = LambdaStream::new(seed, start);
    let mut tally = Tally::default();
    for _ in 0..len {
        let lambda = stream.next_lambda();
        if excluded(lambda, theta, b) {
            tally.rejected += 1;
        } else if joint_product(theta, lambda) > 0.0 {
            tally.plus += 1;
        } else {
            tally.minus += 1;
        }
    }
    tally
}

fn chunk_bounds(config: &SamplerConfig) -> Vec<(u64, u64)> {
    let n_chunks = config.n_samples.div_ceil(config.chunk_size);
    (0..n_chunks)
        .map(|k| {
            let start = k * config.chunk_size;
            (start, config.chunk_size.min(config.n_samples - start))
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn tally_all(config: &SamplerConfig, theta: f64, b: f64) -> Tally {
    use rayon::prelude::*;
    chunk_bounds(config)
        .into_par_iter()
        .map(|(start, len)| run_chunk(config.seed, start, len, theta, b))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge)
}

#[cfg(not(feature = "parallel"))]
fn tally_all(config: &SamplerConfig, theta: f64, b: f64) -> Tally {
    chunk_bounds(config)
        .into_iter()
        .map(|(start, len)| run_chunk(config.seed, start, len, theta, b))
        .fold(Tally::default(), Tally::merge)
}

/// Estimates the correlation of `model` at relative angle `theta ∈ [0, π]`.
pub fn estimate_correlation(
    model: &Model,
    theta: f64,
    config: &SamplerConfig,
) -> Result<CorrelationEstimate> {
    config.validate()?;
    if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "[0, pi]",
        });
    }
    let b = model.halfwidth(theta);
    if b >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::DegenerateBand(b));
    }
    let mut tally = tally_all(config, theta, b);
    if model.product_sign() < 0.0 {
        std::mem::swap(&mut tally.plus, &mut tally.minus);
    }
    let n_accepted = tally.plus + tally.minus;
    if n_accepted == 0 {
        return Err(Error::AllRejected);
    }
    let n = n_accepted as f64;
    let mean = (tally.plus as f64 - tally.minus as f64) / n;
    // unbiased sample variance of ±1 outcomes
    let std_error = if n_accepted > 1 {
        let var = ((1.0 - mean * mean) * n / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(CorrelationEstimate {
        mean,
        std_error,
        n_accepted,
        n_rejected: tally.rejected,
        seed: config.seed,
    })
}

/// Caps the worker pool used for chunked sampling. Only the first call has
/// an effect; worker count never changes results.
#[cfg(feature = "parallel")]
pub fn init_thread_pool(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}
