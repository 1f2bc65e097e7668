use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::replicas::replicate;
use crate::rng::exp_time;

/// Leading-order `E[R_t]` for a walk jumping at rate `rho` to each neighbour.
///
/// d = 1: `4 sqrt(rho/pi) sqrt(t)`; d = 2: `4 rho pi t / log t` (needs `t > 1`).
pub fn expected_range_asymptotic(d: usize, rho: f64, t: f64) -> Result<f64> {
    check(d, rho, t)?;
    match d {
        1 => Ok(4.0 * (rho / std::f64::consts::PI).sqrt() * t.sqrt()),
        _ if t > 1.0 => Ok(4.0 * rho * std::f64::consts::PI * t / t.ln()),
        _ => Err(Error::arg("d = 2 range asymptotic needs t > 1")),
    }
}

/// Monte Carlo `E[R_t]`: number of distinct sites visited by `[0, t]`,
/// starting site included.
pub fn expected_range_mc(d: usize, rho: f64, t: f64, n: u64, seed: u64) -> Result<Estimate> {
    check(d, rho, t)?;
    replicate(seed, n, |rng| Ok(range_sample(d, rho, t, rng) as f64))
}

fn check(d: usize, rho: f64, t: f64) -> Result<()> {
    if !(1..=2).contains(&d) {
        return Err(Error::arg(format!(
            "range is implemented for d = 1, 2, got {d}"
        )));
    }
    if !(rho >= 0.0 && rho.is_finite() && t >= 0.0 && t.is_finite()) {
        return Err(Error::arg("rho and t must be finite and non-negative"));
    }
    Ok(())
}

/// One range sample on Z^d.
pub fn range_sample<R: Rng + ?Sized>(d: usize, rho: f64, t: f64, rng: &mut R) -> usize {
    let rate = 2.0 * d as f64 * rho;
    let mut now = exp_time(rng, rate);
    if d == 1 {
        let (mut x, mut lo, mut hi) = (0i64, 0i64, 0i64);
        while now < t {
            x += if rng.random::<bool>() { 1 } else { -1 };
            lo = lo.min(x);
            hi = hi.max(x);
            now += exp_time(rng, rate);
        }
        (hi - lo + 1) as usize
    } else {
        let mut seen = HashSet::from([(0i64, 0i64)]);
        let mut pos = (0i64, 0i64);
        while now < t {
            match rng.random_range(0..4) {
                0 => pos.0 += 1,
                1 => pos.0 -= 1,
                2 => pos.1 += 1,
                _ => pos.1 -= 1,
            }
            seen.insert(pos);
            now += exp_time(rng, rate);
        }
        seen.len()
    }
}

/// Vacancy lower bound `(1 - p)^{|Q| + E[R_t]}`.
pub fn jensen_vacancy_bound(p: f64, q_size: usize, mean_range: f64) -> f64 {
    (1.0 - p).powf(q_size as f64 + mean_range)
}
