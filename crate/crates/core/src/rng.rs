//! Reproducible, independent random streams per replica.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used by every simulator.
pub type SimRng = ChaCha8Rng;

/// A `(seed, index)` pair naming one ChaCha stream.
///
/// Distinct indices select disjoint ChaCha streams under the same key, so
/// replica `r` always sees the same numbers regardless of scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        RngStream { seed, index }
    }

    pub fn rng(&self) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }
}

/// Derives an unrelated master seed for a sub-experiment.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Waiting time of a Poisson clock with the given total rate (`inf` for rate 0).
#[inline]
pub fn exp_time<R: rand::Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let e: f64 = rng.sample(rand_distr::Exp1);
    e / rate
}
