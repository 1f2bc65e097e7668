use rand::Rng;

use super::path::{SwitchWalkPath, WalkPath};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::model::ModelParams;
use crate::replicas::{replicate_blocks, replicate_many};
use crate::rng::exp_time;
use crate::ssep::{sample_initial, EnvTrace, LatticeConfig};
use crate::switching::SwitchPath;

/// One joint draw of environment, walker and switch with its Feynman–Kac weight.
#[derive(Clone, Debug)]
pub struct JointSample {
    pub trace: EnvTrace,
    pub path: SwitchWalkPath,
    /// `int_0^t alpha(s) xi(X(s), s) ds`
    pub exposure: f64,
    pub gamma: f64,
}

impl JointSample {
    /// `W = exp(gamma * exposure)`.
    pub fn weight(&self) -> f64 {
        (self.gamma * self.exposure).exp()
    }

    /// Recomputes the exposure by sorting every event time and evaluating the
    /// integrand at interval midpoints. Quadratic in the number of events.
    pub fn replay_exposure(&self) -> Result<f64> {
        let t = self.path.horizon();
        let mut cuts: Vec<f64> = vec![0.0, t];
        cuts.extend_from_slice(self.trace.times());
        cuts.extend(self.path.walk.jumps.iter().map(|j| j.0));
        cuts.extend_from_slice(self.path.switch.flips());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let m = 0.5 * (w[0] + w[1]);
            if self.path.switch.active_at(m)
                && self.trace.occupancy_at(self.path.walk.site_at(m), m)?
            {
                total += w[1] - w[0];
            }
        }
        Ok(total)
    }
}

#[derive(Default)]
struct Recorder {
    env: Vec<(f64, usize)>,
    walk: Vec<(f64, usize)>,
    flips: Vec<f64>,
}

pub(super) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::arg("time grid is empty"));
    }
    let mut prev = 0.0;
    for &t in grid {
        if !(t.is_finite() && t > prev) {
            return Err(Error::arg(format!(
                "time grid must be positive and strictly increasing, got {t}"
            )));
        }
        prev = t;
    }
    Ok(())
}

/// Fused event loop over the three clocks (edge exchanges, walker jumps while
/// active, switches). Writes the exposure at every grid time into `out`.
fn run_fused<R: Rng + ?Sized>(
    params: &ModelParams,
    mut config: LatticeConfig,
    grid: &[f64],
    out: &mut [f64],
    rng: &mut R,
    mut rec: Option<&mut Recorder>,
) {
    let torus = params.torus();
    let n_edges = torus.n_edges();
    let degree = torus.degree();
    let (rho, kappa) = (params.rho, params.kappa);
    let r_env = rho * n_edges as f64;
    let r_walk = kappa * degree as f64;
    let (mut now, mut exposure) = (0.0, 0.0);
    let (mut x, mut active) = (0usize, true);
    let mut k = 0;
    loop {
        let r_tot = r_env
            + if active {
                r_walk + params.s1
            } else {
                params.s0
            };
        let dt = exp_time(rng, r_tot);
        if dt == 0.0 {
            continue;
        }
        let next = now + dt;
        let on = active && config.get(x);
        while k < grid.len() && grid[k] <= next {
            if on {
                exposure += grid[k] - now;
            }
            now = grid[k];
            out[k] = exposure;
            k += 1;
        }
        if k == grid.len() {
            return;
        }
        if on {
            exposure += next - now;
        }
        now = next;
        let u = rng.random::<f64>() * r_tot;
        if u < r_env {
            let e = ((u / rho) as usize).min(n_edges - 1);
            let (a, b) = torus.edge(e);
            config.swap(a, b);
            if let Some(r) = rec.as_deref_mut() {
                r.env.push((now, e));
            }
        } else if active && u < r_env + r_walk {
            let dir = (((u - r_env) / kappa) as usize).min(degree - 1);
            x = torus.step(x, dir);
            if let Some(r) = rec.as_deref_mut() {
                r.walk.push((now, x));
            }
        } else {
            active = !active;
            if let Some(r) = rec.as_deref_mut() {
                r.flips.push(now);
            }
        }
    }
}

/// Exposures at every grid time for one replica, environment drawn from the
/// Bernoulli measure. Exposures do not involve `gamma`, so one stream gives
/// common random numbers for every `gamma`.
pub fn sample_exposures<R: Rng + ?Sized>(
    params: &ModelParams,
    grid: &[f64],
    out: &mut [f64],
    rng: &mut R,
) -> Result<()> {
    check_grid(grid)?;
    if out.len() != grid.len() {
        return Err(Error::arg("output slice does not match the grid"));
    }
    let init = sample_initial(&params.torus(), params.p, rng);
    run_fused(params, init, grid, out, rng, None);
    Ok(())
}

/// Fully recorded joint sample on `[0, params.t]` from a given initial configuration.
pub fn sample_fk_from<R: Rng + ?Sized>(
    params: &ModelParams,
    init: LatticeConfig,
    rng: &mut R,
) -> Result<JointSample> {
    let torus = params.torus();
    if init.len() != torus.n_sites() {
        return Err(Error::arg("initial configuration does not match the torus"));
    }
    let t = params.t;
    let mut rec = Recorder::default();
    let mut out = [0.0];
    run_fused(params, init.clone(), &[t], &mut out, rng, Some(&mut rec));
    let trace = EnvTrace::from_events(torus, params.rho, t, init, rec.env)?;
    let switch = SwitchPath::new(t, rec.flips)?;
    Ok(JointSample {
        trace,
        path: SwitchWalkPath {
            walk: WalkPath { jumps: rec.walk },
            switch,
        },
        exposure: out[0],
        gamma: params.gamma,
    })
}

/// Fully recorded joint sample with the environment started from the Bernoulli measure.
pub fn sample_fk<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<JointSample> {
    let init = sample_initial(&params.torus(), params.p, rng);
    sample_fk_from(params, init, rng)
}

/// Annealed `<U(t)>` at `t = params.t`.
pub fn estimate_annealed_u(params: &ModelParams, n: u64, seed: u64) -> Result<Estimate> {
    Ok(estimate_annealed_u_grid(params, &[params.t], n, seed)?[0])
}

/// Annealed `<U(t)>` at each grid time from one run per replica.
pub fn estimate_annealed_u_grid(
    params: &ModelParams,
    grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    let blocks = annealed_blocks(params, grid, n, seed)?;
    Ok(merge_blocks(&blocks, grid.len()))
}

/// Per-block accumulators of the grid estimator, for jackknife errors.
pub fn annealed_blocks(
    params: &ModelParams,
    grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<Vec<Estimate>>> {
    params.validate()?;
    check_grid(grid)?;
    if n == 0 {
        return Err(Error::arg("need at least one replica"));
    }
    let gamma = params.gamma;
    replicate_blocks(seed, n, grid.len(), |rng, out| {
        sample_exposures(params, grid, out, rng)?;
        out.iter_mut().for_each(|v| *v = (gamma * *v).exp());
        Ok(())
    })
}

fn merge_blocks(blocks: &[Vec<Estimate>], k: usize) -> Vec<Estimate> {
    blocks.iter().fold(vec![Estimate::new(); k], |acc, b| {
        acc.iter().zip(b).map(|(x, y)| x.merge(y)).collect()
    })
}

/// Annealed estimate where the environment is pre-simulated as a trace and
/// optionally replayed backwards in time.
pub fn estimate_on_traces(
    params: &ModelParams,
    n: u64,
    seed: u64,
    reversed: bool,
) -> Result<Estimate> {
    params.validate()?;
    let torus = params.torus();
    let v = replicate_many(seed, n, 1, |rng, out| {
        let init = sample_initial(&torus, params.p, rng);
        let tr = crate::ssep::simulate_ssep(init, &torus, params.rho, params.t, rng)?;
        let tr = if reversed { tr.reversed() } else { tr };
        let path = super::path::sample_switch_walk(params, rng)?;
        out[0] = (params.gamma * path.exposure_on_trace(&tr)?).exp();
        Ok(())
    })?;
    Ok(v[0])
}

/// Quenched Feynman–Kac mean over `(X, alpha)` on one fixed trace.
pub fn estimate_quenched_u(
    trace: &EnvTrace,
    params: &ModelParams,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    params.validate()?;
    let torus = params.torus();
    if trace.torus() != &torus || trace.horizon() < params.t {
        return Err(Error::arg(
            "trace does not cover the requested torus and horizon",
        ));
    }
    let v = replicate_many(seed, n, 1, |rng, out| {
        let path =
            super::path::simulate_switch_walk(&torus, params.kappa, params.rates(), params.t, rng)?;
        out[0] = (params.gamma * path.exposure_on_trace(trace)?).exp();
        Ok(())
    })?;
    Ok(v[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RatePair;
    use crate::rng::RngStream;
    use crate::switching::two_state_mgf;

    fn small(gamma: f64, t: f64) -> ModelParams {
        ModelParams {
            d: 1,
            side: 5,
            p: 0.5,
            gamma,
            t,
            ..Default::default()
        }
    }

    #[test]
    fn gamma_zero_is_exactly_one() {
        let e = estimate_annealed_u(&small(0.0, 3.0), 1000, 1).unwrap();
        assert_eq!(e.mean(), 1.0);
        assert_eq!(e.stderr(), 0.0);
    }

    #[test]
    fn frozen_full_environment_without_sleep() {
        let params = ModelParams {
            rho: 0.0,
            kappa: 0.0,
            s1: 0.0,
            gamma: 0.7,
            t: 2.5,
            ..small(0.7, 2.5)
        };
        let s = sample_fk_from(
            &params,
            LatticeConfig::full(5),
            &mut RngStream::new(1, 0).rng(),
        )
        .unwrap();
        assert!((s.weight() - (0.7f64 * 2.5).exp()).abs() < 1e-12);
    }

    #[test]
    fn frozen_origin_reduces_to_switch_mgf() {
        let (g, t) = (1.0, 2.0);
        let params = ModelParams {
            rho: 0.0,
            kappa: 0.0,
            s0: 0.5,
            s1: 1.5,
            ..small(g, t)
        };
        let mut init = LatticeConfig::empty(5);
        init.set(0, true);
        let est = crate::replicas::replicate(3, 100_000, |rng| {
            Ok(sample_fk_from(&params, init.clone(), rng)?.weight())
        })
        .unwrap();
        let exact = two_state_mgf(g, RatePair::new(0.5, 1.5).unwrap(), t);
        assert!(
            (est.mean() - exact).abs() < 3.0 * est.stderr(),
            "{} vs {exact}",
            est.mean()
        );
    }

    #[test]
    fn fused_exposure_matches_slow_replay() {
        for (seed, d) in [(1, 1), (2, 1), (3, 2), (4, 3)] {
            let params = ModelParams {
                d,
                side: 4,
                s0: 0.7,
                s1: 1.3,
                kappa: 1.5,
                rho: 0.8,
                t: 4.0,
                ..small(1.0, 4.0)
            };
            let s = sample_fk(&params, &mut RngStream::new(seed, 0).rng()).unwrap();
            let slow = s.replay_exposure().unwrap();
            assert!((s.exposure - slow).abs() <= 1e-12 * s.exposure.max(1.0));
            let via_path = s.path.exposure_on_trace(&s.trace).unwrap();
            assert!((s.exposure - via_path).abs() <= 1e-12 * s.exposure.max(1.0));
        }
    }

    #[test]
    fn grid_matches_separate_runs() {
        let params = small(1.0, 3.0);
        let grid = [1.0, 2.0, 3.0];
        let mut out = [0.0; 3];
        sample_exposures(&params, &grid, &mut out, &mut RngStream::new(5, 0).rng()).unwrap();
        assert!(out.windows(2).all(|w| w[0] <= w[1]));
        let mut single = [0.0];
        sample_exposures(
            &params,
            &[3.0],
            &mut single,
            &mut RngStream::new(5, 0).rng(),
        )
        .unwrap();
        assert!((single[0] - out[2]).abs() < 1e-12);
        assert!(out[2] <= 3.0);
    }

    #[test]
    fn bad_grid_rejected() {
        let mut out = [0.0; 2];
        let mut rng = RngStream::new(5, 0).rng();
        assert!(sample_exposures(&small(1.0, 1.0), &[2.0, 1.0], &mut out, &mut rng).is_err());
        assert!(estimate_annealed_u_grid(&small(1.0, 1.0), &[], 10, 1).is_err());
    }

    #[test]
    fn monotone_in_gamma_under_common_numbers() {
        let grid = [4.0];
        for r in 0..200 {
            let mut prev = f64::INFINITY;
            for gamma in [-0.5, -1.0, -2.0, -4.0] {
                let mut out = [0.0];
                sample_exposures(
                    &small(gamma, 4.0),
                    &grid,
                    &mut out,
                    &mut RngStream::new(9, r).rng(),
                )
                .unwrap();
                let w = (gamma * out[0]).exp();
                assert!(w <= prev);
                prev = w;
            }
        }
    }

    #[test]
    fn reversed_traces_agree() {
        let params = ModelParams {
            side: 6,
            gamma: -1.0,
            t: 3.0,
            ..Default::default()
        };
        let f = estimate_on_traces(&params, 20_000, 11, false).unwrap();
        let b = estimate_on_traces(&params, 20_000, 12, true).unwrap();
        let fused = estimate_annealed_u(&params, 20_000, 13).unwrap();
        let se = crate::estimate::pooled_stderr(&f, &b);
        assert!((f.mean() - b.mean()).abs() < 3.0 * se);
        assert!((f.mean() - fused.mean()).abs() < 3.0 * crate::estimate::pooled_stderr(&f, &fused));
    }
}
