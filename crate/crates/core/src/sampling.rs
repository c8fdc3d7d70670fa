//! The one seeded generator used by every stochastic routine.
//!
//! Streams come from ChaCha8 (a counter-based stream cipher generator) seeded
//! through `seed_from_u64`, so a seed fixes every draw on every platform.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Name recorded in run summaries.
pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

pub const DEFAULT_SEED: u64 = 42;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `trials` indices with probability proportional to `weights` and
/// returns whole-number counts per index.
pub fn sample_counts(weights: &[f64], trials: u64, seed: u64) -> Result<Vec<u64>> {
    if trials == 0 {
        return Err(Error::domain("trials", "need at least one trial"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::domain("weights", "weights must be finite and non-negative"));
    }
    if !(weights.iter().sum::<f64>() > 0.0) {
        return Err(Error::domain("weights", "all weights are zero"));
    }
    let dist = WeightedIndex::new(weights).map_err(|e| Error::domain("weights", e.to_string()))?;
    let mut rng = seeded_rng(seed);
    let mut counts = vec![0u64; weights.len()];
    for _ in 0..trials {
        counts[dist.sample(&mut rng)] += 1;
    }
    Ok(counts)
}
