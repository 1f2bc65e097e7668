//! Deterministic replica-parallel Monte Carlo.
//!
//! Replica `r` always draws from `RngStream::new(seed, r)`. Replicas are
//! grouped into fixed blocks; blocks run on the current rayon pool and are
//! merged in block order, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::Result;
use crate::estimate::Estimate;
use crate::rng::{RngStream, SimRng};

/// Replicas per block.
pub const BLOCK: u64 = 512;

/// Runs `n` replicas of a `k`-valued sampler and returns one `Estimate` per output.
pub fn replicate_many<F>(seed: u64, n: u64, k: usize, sample: F) -> Result<Vec<Estimate>>
where
    F: Fn(&mut SimRng, &mut [f64]) -> Result<()> + Sync,
{
    let blocks = replicate_blocks(seed, n, k, sample)?;
    Ok(blocks.into_iter().fold(vec![Estimate::new(); k], |acc, b| {
        acc.iter().zip(&b).map(|(x, y)| x.merge(y)).collect()
    }))
}

/// Like [`replicate_many`] but keeps the per-block accumulators (for jackknife).
pub fn replicate_blocks<F>(seed: u64, n: u64, k: usize, sample: F) -> Result<Vec<Vec<Estimate>>>
where
    F: Fn(&mut SimRng, &mut [f64]) -> Result<()> + Sync,
{
    let n_blocks = n.div_ceil(BLOCK);
    (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![Estimate::new(); k];
            let mut out = vec![0.0; k];
            for r in b * BLOCK..((b + 1) * BLOCK).min(n) {
                let mut rng = RngStream::new(seed, r).rng();
                sample(&mut rng, &mut out)?;
                for (a, &x) in acc.iter_mut().zip(&out) {
                    a.push(x);
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Scalar convenience wrapper around [`replicate_many`].
pub fn replicate<F>(seed: u64, n: u64, sample: F) -> Result<Estimate>
where
    F: Fn(&mut SimRng) -> Result<f64> + Sync,
{
    let v = replicate_many(seed, n, 1, |rng, out| {
        out[0] = sample(rng)?;
        Ok(())
    })?;
    Ok(v[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn independent_of_pool_size() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| replicate(11, 3000, |rng| Ok(rng.random::<f64>())).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn error_propagates() {
        let r = replicate(1, 10, |_| Err(crate::Error::arg("boom")));
        assert!(r.is_err());
    }
}
