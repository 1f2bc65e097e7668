use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{ModelParams, RatePair};
use crate::rng::exp_time;
use crate::ssep::{EnvTrace, IndepFieldTrace, WalkerTrack};
use crate::switching::{simulate_alpha, SwitchPath};
use crate::torus::TorusSpec;

/// Jump record of the walker `X`, started at the origin (site 0).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WalkPath {
    pub jumps: Vec<(f64, usize)>,
}

impl WalkPath {
    pub fn site_at(&self, s: f64) -> usize {
        match self.jumps.partition_point(|&(t, _)| t <= s) {
            0 => 0,
            k => self.jumps[k - 1].1,
        }
    }
}

/// A realisation of `(X, alpha)` on `[0, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchWalkPath {
    pub walk: WalkPath,
    pub switch: SwitchPath,
}

/// Maximal interval on which `(X, alpha)` is constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub site: usize,
    pub active: bool,
}

impl SwitchWalkPath {
    pub fn horizon(&self) -> f64 {
        self.switch.horizon()
    }

    /// Constant pieces of the path covering `[0, horizon]`.
    pub fn segments(&self) -> Vec<Segment> {
        let horizon = self.horizon();
        let mut cuts: Vec<f64> = self
            .walk
            .jumps
            .iter()
            .map(|&(t, _)| t)
            .chain(self.switch.flips().iter().copied())
            .collect();
        cuts.sort_by(f64::total_cmp);
        let mut out = Vec::with_capacity(cuts.len() + 1);
        let mut start = 0.0;
        for end in cuts.into_iter().chain(std::iter::once(horizon)) {
            if end > start {
                out.push(Segment {
                    start,
                    end,
                    site: self.walk.site_at(start),
                    active: self.switch.active_at(start),
                });
            }
            start = end;
        }
        out
    }

    /// `int_0^t alpha(s) xi(X(s), s) ds` against an exclusion trace.
    pub fn exposure_on_trace(&self, trace: &EnvTrace) -> Result<f64> {
        check_horizons(self.horizon(), trace.horizon())?;
        let mut cursor = trace.cursor();
        let mut total = 0.0;
        for seg in self.segments().into_iter().filter(|s| s.active) {
            cursor.advance_to(seg.start);
            let mut from = seg.start;
            loop {
                let next = cursor.next_time();
                let upto = next.min(seg.end);
                if cursor.config().get(seg.site) {
                    total += upto - from;
                }
                if next >= seg.end {
                    break;
                }
                cursor.apply_next();
                from = next;
            }
        }
        Ok(total)
    }

    /// Same functional against a field of independent walkers, counting multiplicity.
    pub fn exposure_on_indep(&self, field: &IndepFieldTrace) -> Result<f64> {
        check_horizons(self.horizon(), field.horizon())?;
        let segs: Vec<Segment> = self.segments().into_iter().filter(|s| s.active).collect();
        Ok(field.walkers().iter().map(|w| overlap(&segs, w)).sum())
    }
}

fn check_horizons(path: f64, env: f64) -> Result<()> {
    if path > env {
        return Err(Error::arg(format!(
            "path horizon {path} exceeds environment horizon {env}"
        )));
    }
    Ok(())
}

/// Time a single walker spends on the path's site during the given segments.
fn overlap(segs: &[Segment], walker: &WalkerTrack) -> f64 {
    let mut total = 0.0;
    let mut k = 0;
    let mut site = walker.start;
    for seg in segs {
        while k < walker.jumps.len() && walker.jumps[k].0 <= seg.start {
            site = walker.jumps[k].1;
            k += 1;
        }
        let (mut from, mut here, mut j) = (seg.start, site, k);
        loop {
            let next = walker.jumps.get(j).map_or(f64::INFINITY, |&(t, _)| t);
            let upto = next.min(seg.end);
            if here == seg.site {
                total += upto - from;
            }
            if next >= seg.end {
                break;
            }
            here = walker.jumps[j].1;
            from = next;
            j += 1;
        }
    }
    total
}

/// Samples `(X, alpha)` from `(origin, active)`: the walker jumps at rate `kappa`
/// per neighbour, and only while active.
pub fn simulate_switch_walk<R: Rng + ?Sized>(
    torus: &TorusSpec,
    kappa: f64,
    rates: RatePair,
    horizon: f64,
    rng: &mut R,
) -> Result<SwitchWalkPath> {
    let switch = simulate_alpha(rates, horizon, rng)?;
    let degree = torus.degree();
    let rate = kappa * degree as f64;
    let mut jumps = Vec::new();
    let mut site = 0;
    let bounds: Vec<f64> = std::iter::once(0.0)
        .chain(switch.flips().iter().copied())
        .chain(std::iter::once(horizon))
        .collect();
    for (k, w) in bounds.windows(2).enumerate() {
        if k % 2 == 1 {
            continue;
        }
        let mut s = w[0];
        loop {
            s += exp_time(rng, rate);
            if s > w[1] {
                break;
            }
            site = torus.step(site, rng.random_range(0..degree));
            jumps.push((s, site));
        }
    }
    Ok(SwitchWalkPath {
        walk: WalkPath { jumps },
        switch,
    })
}

/// Convenience wrapper using the model constants.
pub fn sample_switch_walk<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
) -> Result<SwitchWalkPath> {
    simulate_switch_walk(&params.torus(), params.kappa, params.rates(), params.t, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::ssep::{sample_initial, simulate_indep_field, simulate_ssep, LatticeConfig};

    fn path(seed: u64) -> (TorusSpec, SwitchWalkPath) {
        let torus = TorusSpec::new(1, 9).unwrap();
        let rates = RatePair::new(1.0, 1.0).unwrap();
        let p = simulate_switch_walk(&torus, 1.0, rates, 6.0, &mut RngStream::new(seed, 0).rng())
            .unwrap();
        (torus, p)
    }

    #[test]
    fn walker_frozen_while_dormant() {
        for seed in 0..20 {
            let (_, p) = path(seed);
            for &(t, _) in &p.walk.jumps {
                assert!(p.switch.active_at(t), "jump at {t} while dormant");
            }
        }
    }

    #[test]
    fn segments_tile_the_horizon() {
        let (_, p) = path(4);
        let segs = p.segments();
        assert_eq!(segs[0].start, 0.0);
        assert_eq!(segs.last().unwrap().end, 6.0);
        assert!(segs.windows(2).all(|w| w[0].end == w[1].start));
        assert!(segs[0].active && segs[0].site == 0);
    }

    #[test]
    fn exposure_on_trace_matches_midpoint_replay() {
        for seed in 0..10 {
            let (torus, p) = path(seed);
            let mut rng = RngStream::new(seed, 1).rng();
            let init = sample_initial(&torus, 0.5, &mut rng);
            let tr = simulate_ssep(init, &torus, 1.0, 6.0, &mut rng).unwrap();
            let mut cuts: Vec<f64> = tr.times().to_vec();
            cuts.extend(p.segments().iter().map(|s| s.end));
            cuts.push(0.0);
            cuts.sort_by(f64::total_cmp);
            let slow: f64 = cuts
                .windows(2)
                .map(|w| {
                    let m = 0.5 * (w[0] + w[1]);
                    let on =
                        p.switch.active_at(m) && tr.occupancy_at(p.walk.site_at(m), m).unwrap();
                    if on {
                        w[1] - w[0]
                    } else {
                        0.0
                    }
                })
                .sum();
            let fast = p.exposure_on_trace(&tr).unwrap();
            assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        }
    }

    #[test]
    fn full_environment_gives_active_time() {
        let (torus, p) = path(7);
        let tr = simulate_ssep(
            LatticeConfig::full(9),
            &torus,
            1.0,
            6.0,
            &mut RngStream::new(1, 1).rng(),
        )
        .unwrap();
        let active = p.switch.local_times(6.0).1;
        assert!((p.exposure_on_trace(&tr).unwrap() - active).abs() < 1e-12);
    }

    #[test]
    fn exposure_on_indep_matches_midpoint_replay() {
        for seed in 0..10 {
            let (torus, p) = path(seed);
            let f = simulate_indep_field(&torus, 0.4, 1.0, 6.0, &mut RngStream::new(seed, 2).rng())
                .unwrap();
            let mut cuts: Vec<f64> = f
                .walkers()
                .iter()
                .flat_map(|w| w.jumps.iter().map(|j| j.0))
                .collect();
            cuts.extend(p.segments().iter().map(|s| s.end));
            cuts.push(0.0);
            cuts.sort_by(f64::total_cmp);
            let slow: f64 = cuts
                .windows(2)
                .map(|w| {
                    let m = 0.5 * (w[0] + w[1]);
                    if !p.switch.active_at(m) {
                        return 0.0;
                    }
                    (w[1] - w[0]) * f.count_at(p.walk.site_at(m), m).unwrap() as f64
                })
                .sum();
            assert!((p.exposure_on_indep(&f).unwrap() - slow).abs() < 1e-12);
        }
    }

    #[test]
    fn horizon_mismatch_rejected() {
        let (torus, p) = path(1);
        let tr = simulate_ssep(
            LatticeConfig::empty(9),
            &torus,
            1.0,
            2.0,
            &mut RngStream::new(1, 1).rng(),
        )
        .unwrap();
        assert!(p.exposure_on_trace(&tr).is_err());
    }
}
