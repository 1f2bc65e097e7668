use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::exp_time;
use crate::torus::TorusSpec;

/// A field of independent simple random walks (rate `rho` per neighbour)
/// started from a Bernoulli configuration; sites may later hold several walkers.
#[derive(Clone, Debug)]
pub struct IndepFieldTrace {
    torus: TorusSpec,
    rho: f64,
    horizon: f64,
    walkers: Vec<WalkerTrack>,
}

/// One walker: start site and its jumps `(time, new site)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerTrack {
    pub start: usize,
    pub jumps: Vec<(f64, usize)>,
}

impl WalkerTrack {
    pub fn site_at(&self, s: f64) -> usize {
        let k = self.jumps.partition_point(|&(t, _)| t <= s);
        if k == 0 {
            self.start
        } else {
            self.jumps[k - 1].1
        }
    }
}

impl IndepFieldTrace {
    pub fn torus(&self) -> &TorusSpec {
        &self.torus
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn walkers(&self) -> &[WalkerTrack] {
        &self.walkers
    }

    pub fn n_particles(&self) -> usize {
        self.walkers.len()
    }

    /// Number of walkers on `x` at time `s`.
    pub fn count_at(&self, x: usize, s: f64) -> Result<usize> {
        self.torus.check_site(x)?;
        if !(0.0..=self.horizon).contains(&s) {
            return Err(Error::arg(format!(
                "time {s} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(self.walkers.iter().filter(|w| w.site_at(s) == x).count())
    }
}

/// Starts one walker on each site independently with probability `p` and lets
/// each jump at total rate `2 d rho` to a uniform neighbour.
pub fn simulate_indep_field<R: Rng + ?Sized>(
    torus: &TorusSpec,
    p: f64,
    rho: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<IndepFieldTrace> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::arg(format!(
            "horizon must be finite and non-negative, got {horizon}"
        )));
    }
    let degree = torus.degree();
    let rate = rho * degree as f64;
    let mut walkers = Vec::new();
    for x in 0..torus.n_sites() {
        if rng.random::<f64>() >= p {
            continue;
        }
        let mut jumps = Vec::new();
        let (mut t, mut pos) = (0.0, x);
        loop {
            t += exp_time(rng, rate);
            if t > horizon {
                break;
            }
            pos = torus.step(pos, rng.random_range(0..degree));
            jumps.push((t, pos));
        }
        walkers.push(WalkerTrack { start: x, jumps });
    }
    Ok(IndepFieldTrace {
        torus: *torus,
        rho,
        horizon,
        walkers,
    })
}
