use rand::Rng;

use super::lattice::{sample_initial, LatticeConfig};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::replicas::{replicate, replicate_many};
use crate::rng::exp_time;
use crate::torus::TorusSpec;

/// Runs the exchange dynamics on `config` for `duration` without recording events.
pub fn evolve_ssep<R: Rng + ?Sized>(
    config: &mut LatticeConfig,
    torus: &TorusSpec,
    rho: f64,
    duration: f64,
    rng: &mut R,
) {
    let n_edges = torus.n_edges();
    let rate = rho * n_edges as f64;
    let mut t = exp_time(rng, rate);
    while t <= duration {
        let (a, b) = torus.edge(rng.random_range(0..n_edges));
        config.swap(a, b);
        t += exp_time(rng, rate);
    }
}

/// Occupancy statistics of the stationary exclusion process at time `t`.
#[derive(Clone, Debug)]
pub struct StationarityStats {
    /// `xi(site, t)`.
    pub site_marginal: Estimate,
    /// `xi(site, t) * xi(neighbour, t)`.
    pub pair: Estimate,
    /// Occupied fraction of the whole torus at `t`.
    pub density: Estimate,
    /// `T_t / t`.
    pub occupation_fraction: Estimate,
    /// Replicas whose particle count changed (must be zero).
    pub count_violations: u64,
}

/// Starts from the Bernoulli measure, runs to `t`, and records occupancy statistics.
pub fn stationarity_stats(
    torus: &TorusSpec,
    p: f64,
    rho: f64,
    t: f64,
    n: u64,
    seed: u64,
) -> Result<StationarityStats> {
    if t <= 0.0 {
        return Err(Error::arg("stationarity check needs t > 0"));
    }
    let neighbour = torus.step(0, 0);
    let n_edges = torus.n_edges();
    let rate = rho * n_edges as f64;
    let est = replicate_many(seed, n, 5, |rng, out| {
        let mut c = sample_initial(torus, p, rng);
        let n0 = c.count_ones();
        let (mut now, mut local) = (0.0, 0.0);
        loop {
            let dt = exp_time(rng, rate);
            let next = (now + dt).min(t);
            if c.get(0) {
                local += next - now;
            }
            now = next;
            if now >= t {
                break;
            }
            let (a, b) = torus.edge(rng.random_range(0..n_edges));
            c.swap(a, b);
        }
        out[0] = c.get(0) as u8 as f64;
        out[1] = (c.get(0) && c.get(neighbour)) as u8 as f64;
        out[2] = c.count_ones() as f64 / torus.n_sites() as f64;
        out[3] = local / t;
        out[4] = (c.count_ones() != n0) as u8 as f64;
        Ok(())
    })?;
    Ok(StationarityStats {
        site_marginal: est[0],
        pair: est[1],
        density: est[2],
        occupation_fraction: est[3],
        count_violations: est[4].sum() as u64,
    })
}

/// Monte Carlo estimate of `P(xi(x, s) = 0 for all x in box, s <= t)` under
/// the Bernoulli start, with early exit at the first particle entering the box.
pub fn vacancy_probability_mc(
    torus: &TorusSpec,
    p: f64,
    rho: f64,
    sites: &[usize],
    t: f64,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    if sites.is_empty() {
        return Err(Error::arg("box must contain at least one site"));
    }
    for &x in sites {
        torus.check_site(x)?;
    }
    let mut inside = vec![false; torus.n_sites()];
    for &x in sites {
        inside[x] = true;
    }
    let n_edges = torus.n_edges();
    let rate = rho * n_edges as f64;
    replicate(seed, n, |rng| {
        let mut c = sample_initial(torus, p, rng);
        if sites.iter().any(|&x| c.get(x)) {
            return Ok(0.0);
        }
        let mut now = exp_time(rng, rate);
        while now <= t {
            let (a, b) = torus.edge(rng.random_range(0..n_edges));
            if (inside[a] && c.get(b)) || (inside[b] && c.get(a)) {
                return Ok(0.0);
            }
            c.swap(a, b);
            now += exp_time(rng, rate);
        }
        Ok(1.0)
    })
}
