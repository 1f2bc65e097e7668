use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::model::ModelParams;
use crate::replicas::replicate;
use crate::rng::exp_time;
use crate::ssep::sample_initial;

/// Population cap of the direct simulation.
pub const EXPLOSION_LIMIT: usize = 1_000_000;

/// Result of one branching run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum BranchingOutcome {
    Completed { population: u64 },
    Truncated { time: f64, population: u64 },
}

/// Direct Gillespie simulation of the two-type population in one exclusion
/// environment, started from a single active individual at the origin.
///
/// Active individuals jump (`kappa` per neighbour), fall asleep (`s1`),
/// branch (`gamma+` on occupied sites) and die (`gamma-` on occupied sites);
/// dormant ones wake up at rate `s0`. Site-dependent rates are handled by
/// thinning against the bound `|gamma|`.
pub fn simulate_branching<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
) -> Result<BranchingOutcome> {
    params.validate()?;
    let torus = params.torus();
    let mut env = sample_initial(&torus, params.p, rng);
    let n_edges = torus.n_edges();
    let degree = torus.degree();
    let r_env = params.rho * n_edges as f64;
    let g = params.gamma.abs();
    let r_active = params.kappa * degree as f64 + params.s1 + g;
    let mut active: Vec<usize> = vec![0];
    let mut dormant: Vec<usize> = Vec::new();
    let mut now = 0.0;
    loop {
        if active.len() + dormant.len() > EXPLOSION_LIMIT {
            return Ok(BranchingOutcome::Truncated {
                time: now,
                population: (active.len() + dormant.len()) as u64,
            });
        }
        let ra = r_active * active.len() as f64;
        let rd = params.s0 * dormant.len() as f64;
        let r_tot = r_env + ra + rd;
        now += exp_time(rng, r_tot);
        if now > params.t {
            return Ok(BranchingOutcome::Completed {
                population: (active.len() + dormant.len()) as u64,
            });
        }
        let u = rng.random::<f64>() * r_tot;
        if u < r_env {
            let (a, b) = torus.edge(((u / params.rho) as usize).min(n_edges - 1));
            env.swap(a, b);
        } else if u < r_env + ra {
            let v = u - r_env;
            let i = ((v / r_active) as usize).min(active.len() - 1);
            let w = v - i as f64 * r_active;
            let hop = params.kappa * degree as f64;
            if w < hop {
                let dir = ((w / params.kappa) as usize).min(degree - 1);
                active[i] = torus.step(active[i], dir);
            } else if w < hop + params.s1 {
                dormant.push(active.swap_remove(i));
            } else if env.get(active[i]) {
                if params.gamma > 0.0 {
                    active.push(active[i]);
                } else {
                    active.swap_remove(i);
                }
            }
        } else {
            let i = (((u - r_env - ra) / params.s0) as usize).min(dormant.len() - 1);
            active.push(dormant.swap_remove(i));
        }
    }
}

/// Mean population over `n` runs. A truncated run is a numerical error.
pub fn estimate_branching_mean(params: &ModelParams, n: u64, seed: u64) -> Result<Estimate> {
    replicate(seed, n, |rng| match simulate_branching(params, rng)? {
        BranchingOutcome::Completed { population } => Ok(population as f64),
        BranchingOutcome::Truncated { time, .. } => Err(Error::Explosion {
            limit: EXPLOSION_LIMIT,
            time,
        }),
    })
}
