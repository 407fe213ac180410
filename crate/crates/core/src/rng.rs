//! Seeded random source for simulation runs.

use rand::distr::{Distribution, Uniform};
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

/// Deterministic pseudo-random stream behind every stochastic selection.
///
/// Constructed from a 64-bit seed; the same seed always yields the same
/// selection sequence and therefore a bit-identical final market state.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: Pcg64,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: Pcg64::seed_from_u64(seed),
        }
    }

    /// Uniform draw using a prepared distribution (hot path).
    #[inline]
    pub(crate) fn sample(&mut self, dist: &Uniform<usize>) -> usize {
        dist.sample(&mut self.rng)
    }

    /// Bernoulli draw; consumes one uniform variate even when `p` is 0 or 1
    /// so the stream stays aligned across pressure settings.
    #[inline]
    pub(crate) fn chance(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }
}
