use std::io::Write;

use rand::Rng;

use super::lattice::LatticeConfig;
use crate::error::{Error, Result};
use crate::rng::exp_time;
use crate::torus::TorusSpec;

/// Recorded exclusion dynamics on `[0, horizon]`: an initial configuration and
/// the time-sorted edge exchanges applied to it.
///
/// The configuration is right-continuous: at an event time it already shows
/// the exchanged state.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvTrace {
    torus: TorusSpec,
    rho: f64,
    horizon: f64,
    initial: LatticeConfig,
    times: Vec<f64>,
    edges: Vec<u32>,
}

impl EnvTrace {
    /// Builds a trace from explicit events. Times must be strictly increasing in `[0, horizon]`.
    pub fn from_events(
        torus: TorusSpec,
        rho: f64,
        horizon: f64,
        initial: LatticeConfig,
        events: Vec<(f64, usize)>,
    ) -> Result<Self> {
        if initial.len() != torus.n_sites() {
            return Err(Error::arg("initial configuration does not match the torus"));
        }
        let mut prev = f64::NEG_INFINITY;
        for &(t, e) in &events {
            if !(t > prev && (0.0..=horizon).contains(&t)) {
                return Err(Error::arg(format!(
                    "event time {t} out of order or outside [0, {horizon}]"
                )));
            }
            if e >= torus.n_edges() {
                return Err(Error::arg(format!("edge {e} out of range")));
            }
            prev = t;
        }
        let (times, edges) = events.into_iter().map(|(t, e)| (t, e as u32)).unzip();
        Ok(EnvTrace {
            torus,
            rho,
            horizon,
            initial,
            times,
            edges,
        })
    }

    pub fn torus(&self) -> &TorusSpec {
        &self.torus
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn initial(&self) -> &LatticeConfig {
        &self.initial
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Event `k` as `(time, site_a, site_b)`.
    pub fn event(&self, k: usize) -> (f64, usize, usize) {
        let (a, b) = self.torus.edge(self.edges[k] as usize);
        (self.times[k], a, b)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn cursor(&self) -> TraceCursor<'_> {
        TraceCursor {
            trace: self,
            config: self.initial.clone(),
            next: 0,
        }
    }

    /// Configuration at time `s` by full replay.
    pub fn config_at(&self, s: f64) -> Result<LatticeConfig> {
        self.check_time(s)?;
        let mut c = self.cursor();
        c.advance_to(s);
        Ok(c.config)
    }

    /// `xi(x, s)` by full replay from the initial configuration.
    pub fn occupancy_at(&self, x: usize, s: f64) -> Result<bool> {
        self.torus.check_site(x)?;
        Ok(self.config_at(s)?.get(x))
    }

    pub fn final_config(&self) -> LatticeConfig {
        let mut c = self.cursor();
        c.advance_to(self.horizon);
        c.config
    }

    /// The same trace read backwards in time: starts from the final
    /// configuration and replays the exchanges at `horizon - t_k` in reverse order.
    pub fn reversed(&self) -> EnvTrace {
        let times: Vec<f64> = self.times.iter().rev().map(|t| self.horizon - t).collect();
        let edges: Vec<u32> = self.edges.iter().rev().copied().collect();
        EnvTrace {
            torus: self.torus,
            rho: self.rho,
            horizon: self.horizon,
            initial: self.final_config(),
            times,
            edges,
        }
    }

    /// Exact `int_0^t xi(x, s) ds`.
    pub fn occupation_time(&self, x: usize, t: f64) -> Result<f64> {
        self.torus.check_site(x)?;
        self.check_time(t)?;
        let mut occ = self.initial.get(x);
        let mut config = self.initial.clone();
        let (mut last, mut total) = (0.0, 0.0);
        for k in 0..self.times.len() {
            let tk = self.times[k];
            if tk > t {
                break;
            }
            let (a, b) = self.torus.edge(self.edges[k] as usize);
            config.swap(a, b);
            if a == x || b == x {
                if occ {
                    total += tk - last;
                }
                last = tk;
                occ = config.get(x);
            }
        }
        if occ {
            total += t - last;
        }
        Ok(total)
    }

    /// Local time of the exclusion process at the origin, `T_t`.
    pub fn occupation_time_origin(&self, t: f64) -> Result<f64> {
        self.occupation_time(0, t)
    }

    /// Debug dump: CSV with header `time,edgeSiteA,edgeSiteB`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time,edgeSiteA,edgeSiteB")?;
        for k in 0..self.len() {
            let (t, a, b) = self.event(k);
            writeln!(w, "{t:.16e},{a},{b}")?;
        }
        Ok(())
    }

    fn check_time(&self, s: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&s) {
            return Err(Error::arg(format!(
                "time {s} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Forward replay of a trace with a cached position.
#[derive(Clone, Debug)]
pub struct TraceCursor<'a> {
    trace: &'a EnvTrace,
    config: LatticeConfig,
    next: usize,
}

impl<'a> TraceCursor<'a> {
    /// Applies every event with time `<= s`. Rewinds when `s` precedes the cursor.
    pub fn advance_to(&mut self, s: f64) {
        if self.next > 0 && self.trace.times[self.next - 1] > s {
            self.config = self.trace.initial.clone();
            self.next = 0;
        }
        while self.next < self.trace.times.len() && self.trace.times[self.next] <= s {
            self.apply_next();
        }
    }

    /// Time of the next unapplied event.
    #[inline]
    pub fn next_time(&self) -> f64 {
        self.trace
            .times
            .get(self.next)
            .copied()
            .unwrap_or(f64::INFINITY)
    }

    /// Applies the next event and returns its endpoints.
    #[inline]
    pub fn apply_next(&mut self) -> (usize, usize) {
        let (a, b) = self.trace.torus.edge(self.trace.edges[self.next] as usize);
        self.config.swap(a, b);
        self.next += 1;
        (a, b)
    }

    #[inline]
    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }
}

/// Simulates the exchange dynamics: every edge swaps its two sites at rate `rho`.
///
/// Events form one Poisson process of total rate `rho * d * N`; each picks a
/// uniform edge.
pub fn simulate_ssep<R: Rng + ?Sized>(
    init: LatticeConfig,
    torus: &TorusSpec,
    rho: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<EnvTrace> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::arg(format!(
            "horizon must be finite and non-negative, got {horizon}"
        )));
    }
    if init.len() != torus.n_sites() {
        return Err(Error::arg("initial configuration does not match the torus"));
    }
    let n_edges = torus.n_edges();
    let rate = rho * n_edges as f64;
    let mut times = Vec::new();
    let mut edges = Vec::new();
    let mut t = 0.0;
    loop {
        let dt = exp_time(rng, rate);
        if dt == 0.0 {
            continue;
        }
        t += dt;
        if t > horizon {
            break;
        }
        times.push(t);
        edges.push(rng.random_range(0..n_edges) as u32);
    }
    times.shrink_to_fit();
    Ok(EnvTrace {
        torus: *torus,
        rho,
        horizon,
        initial: init,
        times,
        edges,
    })
}
