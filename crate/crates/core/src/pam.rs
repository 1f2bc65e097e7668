//! Quenched parabolic Anderson model with switching on a fixed exclusion trace.
//!
//! The state vector is laid out site-major, state-minor (`2 x + i`). Mass moves
//! from active to dormant at rate `s1` and back at rate `s0`; active mass
//! diffuses with rate `kappa` per neighbour and grows at rate `gamma * xi`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::model::ModelParams;
use crate::replicas::replicate;
use crate::ssep::{sample_initial, simulate_ssep, EnvTrace, LatticeConfig};
use crate::torus::TorusSpec;

/// Default local error per unit time.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Smallest step the integrator may take before giving up.
pub const STEP_FLOOR: f64 = 1e-12;
/// Largest torus handled by the dense exponential path.
pub const DENSE_MAX_SITES: usize = 64;

/// Solution snapshot `u(x, i, t)`.
#[derive(Clone, Debug)]
pub struct QuenchedField {
    torus: TorusSpec,
    time: f64,
    values: Vec<f64>,
    /// Most negative component seen at any accepted step.
    pub min_component: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl QuenchedField {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn torus(&self) -> &TorusSpec {
        &self.torus
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, active: bool) -> f64 {
        self.values[2 * x + active as usize]
    }

    /// `U = sum over sites and states`.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &QuenchedField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `x,i,u`; `x` is the colon-joined coordinate vector.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,i,u")?;
        for x in 0..self.torus.n_sites() {
            let coords: Vec<String> = self.torus.coords(x).iter().map(|c| c.to_string()).collect();
            for i in 0..2 {
                writeln!(
                    w,
                    "{},{},{:.16e}",
                    coords.join(":"),
                    i,
                    self.values[2 * x + i]
                )?;
            }
        }
        Ok(())
    }
}

struct Operator {
    neighbors: Vec<usize>,
    degree: usize,
    kappa: f64,
    s0: f64,
    s1: f64,
    gamma: f64,
}

impl Operator {
    fn new(params: &ModelParams, torus: &TorusSpec) -> Self {
        let degree = torus.degree();
        let neighbors = (0..torus.n_sites())
            .flat_map(|x| (0..degree).map(move |k| torus.step(x, k)))
            .collect();
        Operator {
            neighbors,
            degree,
            kappa: params.kappa,
            s0: params.s0,
            s1: params.s1,
            gamma: params.gamma,
        }
    }

    /// `out = A(xi) u`.
    fn apply(&self, env: &LatticeConfig, u: &[f64], out: &mut [f64]) {
        let n = u.len() / 2;
        for x in 0..n {
            let (u0, u1) = (u[2 * x], u[2 * x + 1]);
            let mut lap = 0.0;
            for &y in &self.neighbors[x * self.degree..(x + 1) * self.degree] {
                lap += u[2 * y + 1] - u1;
            }
            let pot = if env.get(x) { self.gamma * u1 } else { 0.0 };
            out[2 * x] = self.s1 * u1 - self.s0 * u0;
            out[2 * x + 1] = self.kappa * lap + self.s0 * u0 - self.s1 * u1 + pot;
        }
    }

    fn dense(&self, env: &LatticeConfig) -> DMatrix<f64> {
        let n = env.len();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        let mut e = vec![0.0; 2 * n];
        let mut col = vec![0.0; 2 * n];
        for j in 0..2 * n {
            e[j] = 1.0;
            self.apply(env, &e, &mut col);
            a.set_column(j, &DVector::from_column_slice(&col));
            e[j] = 0.0;
        }
        a
    }

    fn norm_bound(&self) -> f64 {
        2.0 * self.degree as f64 * self.kappa + 2.0 * self.s0.max(self.s1) + self.gamma.abs()
    }
}

fn check_inputs(trace: &EnvTrace, params: &ModelParams, t: f64) -> Result<()> {
    params.validate()?;
    if trace.torus() != &params.torus() {
        return Err(Error::arg("trace torus does not match the parameters"));
    }
    if !(t >= 0.0 && t <= trace.horizon()) {
        return Err(Error::arg(format!(
            "t = {t} outside [0, {}]",
            trace.horizon()
        )));
    }
    Ok(())
}

fn delta_origin(n: usize) -> Vec<f64> {
    let mut u = vec![0.0; 2 * n];
    u[1] = 1.0;
    u
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Integrator {
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    trial: Vec<f64>,
    h: f64,
    tol: f64,
    accepted: usize,
    rejected: usize,
    min_component: f64,
}

impl Integrator {
    fn new(dim: usize, h: f64, tol: f64) -> Self {
        Integrator {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            stage: vec![0.0; dim],
            trial: vec![0.0; dim],
            h,
            tol,
            accepted: 0,
            rejected: 0,
            min_component: 0.0,
        }
    }

    /// Integrates `u' = A u` over a piece of length `len` with the potential frozen.
    fn piece(
        &mut self,
        op: &Operator,
        env: &LatticeConfig,
        u: &mut [f64],
        len: f64,
        at: f64,
    ) -> Result<()> {
        let mut done = 0.0;
        let mut fresh_k1 = false;
        while done < len {
            let remaining = len - done;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if !fresh_k1 {
                op.apply(env, u, &mut self.k[0]);
            }
            for s in 1..7 {
                for j in 0..u.len() {
                    let mut acc = 0.0;
                    for (r, a) in A[s][..s].iter().enumerate() {
                        acc += a * self.k[r][j];
                    }
                    self.stage[j] = u[j] + h * acc;
                }
                op.apply(env, &self.stage, &mut self.k[s]);
            }
            // the last stage is evaluated at the fifth-order solution
            self.trial.copy_from_slice(&self.stage);
            let scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let mut err = 0.0f64;
            for j in 0..u.len() {
                let mut e = 0.0;
                for (r, w) in E.iter().enumerate() {
                    e += w * self.k[r][j];
                }
                err = err.max((h * e).abs());
            }
            let ratio = err / (self.tol * h * scale);
            if ratio <= 1.0 || h <= STEP_FLOOR {
                if ratio > 1.0 && remaining > STEP_FLOOR {
                    return Err(Error::NonConvergence {
                        method: "Dormand-Prince",
                        detail: format!(
                            "step {h:e} at time {:.6} still has error ratio {ratio:.3e}",
                            at + done
                        ),
                    });
                }
                u.copy_from_slice(&self.trial);
                done = if last { len } else { done + h };
                self.accepted += 1;
                let low = u.iter().copied().fold(0.0, f64::min);
                self.min_component = self.min_component.min(low);
                self.k.swap(0, 6);
                fresh_k1 = true;
                let factor = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.25)).clamp(0.2, 5.0)
                };
                // a step clipped to the piece end says little about the natural step size
                if !(last && h < self.h) {
                    self.h = h * factor;
                }
            } else {
                self.rejected += 1;
                self.h = (h * (0.9 * ratio.powf(-0.25)).max(0.2)).max(STEP_FLOOR);
                fresh_k1 = true;
            }
        }
        Ok(())
    }
}

/// Solves the quenched equation on `[0, t]` from `delta_(0, active)` with an
/// embedded Runge–Kutta scheme, restarting the stage sequence at every
/// environment event.
pub fn solve_quenched(
    trace: &EnvTrace,
    params: &ModelParams,
    t: f64,
    tol: f64,
) -> Result<QuenchedField> {
    check_inputs(trace, params, t)?;
    if !(tol > 0.0) {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    let torus = params.torus();
    let op = Operator::new(params, &torus);
    let mut u = delta_origin(torus.n_sites());
    let mut rk = Integrator::new(u.len(), 0.5 / op.norm_bound().max(1e-3), tol);
    let mut cursor = trace.cursor();
    let mut now = 0.0;
    while now < t {
        let next = cursor.next_time().min(t);
        if next > now {
            rk.piece(&op, cursor.config(), &mut u, next - now, now)?;
        }
        now = next;
        if now < t {
            cursor.apply_next();
        }
    }
    Ok(QuenchedField {
        torus,
        time: t,
        values: u,
        min_component: rk.min_component,
        accepted_steps: rk.accepted,
        rejected_steps: rk.rejected,
    })
}

/// Piecewise dense matrix exponential; only for tori with at most 64 sites.
pub fn solve_quenched_dense(
    trace: &EnvTrace,
    params: &ModelParams,
    t: f64,
) -> Result<QuenchedField> {
    check_inputs(trace, params, t)?;
    let torus = params.torus();
    if torus.n_sites() > DENSE_MAX_SITES {
        return Err(Error::DimensionOverflow {
            dim: torus.n_sites(),
            cap: DENSE_MAX_SITES,
        });
    }
    let op = Operator::new(params, &torus);
    let mut u = DVector::from_vec(delta_origin(torus.n_sites()));
    let mut cursor = trace.cursor();
    let mut now = 0.0;
    while now < t {
        let next = cursor.next_time().min(t);
        if next > now {
            u = (op.dense(cursor.config()) * (next - now)).exp() * u;
        }
        now = next;
        if now < t {
            cursor.apply_next();
        }
    }
    let min_component = u.iter().copied().fold(0.0, f64::min);
    Ok(QuenchedField {
        torus,
        time: t,
        values: u.as_slice().to_vec(),
        min_component,
        accepted_steps: 0,
        rejected_steps: 0,
    })
}

/// Mean total mass over independent stationary traces.
pub fn annealed_average(
    params: &ModelParams,
    t: f64,
    n: u64,
    tol: f64,
    seed: u64,
) -> Result<Estimate> {
    params.validate()?;
    let torus = params.torus();
    replicate(seed, n, |rng| {
        let init = sample_initial(&torus, params.p, rng);
        let trace = simulate_ssep(init, &torus, params.rho, t, rng)?;
        Ok(solve_quenched(&trace, params, t, tol)?.total_mass())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn random_trace(params: &ModelParams, horizon: f64, seed: u64) -> EnvTrace {
        let torus = params.torus();
        let mut rng = RngStream::new(seed, 0).rng();
        let init = sample_initial(&torus, params.p, &mut rng);
        simulate_ssep(init, &torus, params.rho, horizon, &mut rng).unwrap()
    }

    #[test]
    fn mass_conserved_without_potential() {
        let params = ModelParams {
            side: 8,
            gamma: 0.0,
            s0: 0.5,
            s1: 2.0,
            ..Default::default()
        };
        let tr = random_trace(&params, 10.0, 1);
        let f = solve_quenched(&tr, &params, 10.0, DEFAULT_TOL).unwrap();
        assert!((f.total_mass() - 1.0).abs() < 1e-8);
        assert!(f.min_component >= -DEFAULT_TOL);
    }

    #[test]
    fn initial_mass_is_one() {
        let params = ModelParams::default();
        let tr = random_trace(&params, 1.0, 2);
        assert_eq!(
            solve_quenched(&tr, &params, 0.0, DEFAULT_TOL)
                .unwrap()
                .total_mass(),
            1.0
        );
    }

    #[test]
    fn decoupled_scalar_growth() {
        let params = ModelParams {
            side: 5,
            kappa: 0.0,
            s0: 0.0,
            s1: 0.0,
            rho: 0.0,
            gamma: 0.8,
            ..Default::default()
        };
        let torus = params.torus();
        for origin in [false, true] {
            let mut init = LatticeConfig::empty(5);
            init.set(0, origin);
            init.set(2, true);
            let tr = EnvTrace::from_events(torus, 0.0, 3.0, init, vec![]).unwrap();
            let f = solve_quenched(&tr, &params, 3.0, 1e-10).unwrap();
            let expect = if origin { (0.8f64 * 3.0).exp() } else { 1.0 };
            assert!((f.get(0, true) - expect).abs() < 1e-8 * expect);
            assert_eq!(f.get(0, false), 0.0);
            assert_eq!(f.get(2, true), 0.0);
        }
    }

    #[test]
    fn runge_kutta_matches_dense_exponential() {
        let params = ModelParams {
            side: 16,
            gamma: 1.0,
            s0: 0.7,
            s1: 1.3,
            ..Default::default()
        };
        let tr = random_trace(&params, 3.0, 3);
        let rk = solve_quenched(&tr, &params, 3.0, DEFAULT_TOL).unwrap();
        let dense = solve_quenched_dense(&tr, &params, 3.0).unwrap();
        assert!(
            rk.max_abs_diff(&dense) <= 1e-7,
            "{}",
            rk.max_abs_diff(&dense)
        );
        assert!(rk.min_component >= -DEFAULT_TOL);
    }

    #[test]
    fn negative_potential_stays_positive() {
        let params = ModelParams {
            side: 10,
            gamma: -5.0,
            ..Default::default()
        };
        let tr = random_trace(&params, 5.0, 4);
        let f = solve_quenched(&tr, &params, 5.0, DEFAULT_TOL).unwrap();
        assert!(f.min_component >= -DEFAULT_TOL);
        assert!(f.total_mass() < 1.0);
    }

    #[test]
    fn zero_effect_events_do_not_change_solution() {
        let params = ModelParams {
            side: 6,
            gamma: 1.0,
            ..Default::default()
        };
        let tr = random_trace(&params, 2.0, 5);
        // insert swaps of two sites holding equal states
        let mut events: Vec<(f64, usize)> = (0..tr.len())
            .map(|k| {
                let (t, a, b) = tr.event(k);
                let e = (0..tr.torus().n_edges())
                    .find(|&e| tr.torus().edge(e) == (a, b))
                    .unwrap();
                (t, e)
            })
            .collect();
        let mut extra = Vec::new();
        for s in [0.3, 0.9, 1.45] {
            let cfg = tr.config_at(s).unwrap();
            if let Some(e) = (0..tr.torus().n_edges()).find(|&e| {
                let (a, b) = tr.torus().edge(e);
                cfg.get(a) == cfg.get(b)
            }) {
                extra.push((s, e));
            }
        }
        assert!(!extra.is_empty());
        events.extend(extra);
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let refined = EnvTrace::from_events(
            *tr.torus(),
            tr.rho(),
            tr.horizon(),
            tr.initial().clone(),
            events,
        )
        .unwrap();
        let a = solve_quenched(&tr, &params, 2.0, 1e-12).unwrap();
        let b = solve_quenched(&refined, &params, 2.0, 1e-12).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-10);
        let c = solve_quenched_dense(&tr, &params, 2.0).unwrap();
        let d = solve_quenched_dense(&refined, &params, 2.0).unwrap();
        assert!(c.max_abs_diff(&d) <= 1e-10);
    }

    #[test]
    fn frozen_environments_match_exhaustive_average() {
        let params = ModelParams {
            rho: 0.0,
            gamma: 1.0,
            t: 2.0,
            ..Default::default()
        };
        let torus = params.torus();
        let exact: f64 = (0..8u64)
            .map(|c| {
                let init = LatticeConfig::from_index(c, 3);
                let k = init.count_ones() as i32;
                let w = params.p.powi(k) * (1.0 - params.p).powi(3 - k);
                let tr = EnvTrace::from_events(torus, 0.0, 2.0, init, vec![]).unwrap();
                w * solve_quenched_dense(&tr, &params, 2.0)
                    .unwrap()
                    .total_mass()
            })
            .sum();
        let est = annealed_average(&params, 2.0, 4000, DEFAULT_TOL, 6).unwrap();
        assert!(
            (est.mean() - exact).abs() < 3.0 * est.stderr(),
            "{} vs {exact}",
            est.mean()
        );
    }

    #[test]
    fn gamma_zero_average_is_one() {
        let params = ModelParams {
            gamma: 0.0,
            ..Default::default()
        };
        let e = annealed_average(&params, 3.0, 50, DEFAULT_TOL, 1).unwrap();
        assert!((e.mean() - 1.0).abs() < 1e-8);
        assert!(e.stderr() < 1e-8);
    }

    #[test]
    fn quenched_feynman_kac_duality() {
        let params = ModelParams {
            side: 4,
            gamma: 1.0,
            t: 3.0,
            s1: 2.0,
            ..Default::default()
        };
        let tr = random_trace(&params, 3.0, 8);
        let mass = solve_quenched(&tr, &params, 3.0, DEFAULT_TOL)
            .unwrap()
            .total_mass();
        let fk = crate::fk::estimate_quenched_u(&tr, &params, 40_000, 9).unwrap();
        assert!(
            (fk.mean() - mass).abs() < 3.0 * fk.stderr(),
            "{} vs {mass}",
            fk.mean()
        );
    }

    #[test]
    fn bad_inputs() {
        let params = ModelParams::default();
        let tr = random_trace(&params, 1.0, 2);
        assert!(solve_quenched(&tr, &params, 2.0, DEFAULT_TOL).is_err());
        assert!(solve_quenched(&tr, &params, 1.0, 0.0).is_err());
        let big = ModelParams {
            side: 70,
            ..Default::default()
        };
        let tr = random_trace(&big, 1.0, 2);
        assert!(matches!(
            solve_quenched_dense(&tr, &big, 1.0),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let params = ModelParams {
            d: 2,
            side: 3,
            ..Default::default()
        };
        let tr = random_trace(&params, 0.5, 2);
        let f = solve_quenched(&tr, &params, 0.5, DEFAULT_TOL).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,i,u");
        assert_eq!(lines.len(), 1 + 18);
        assert!(lines[1].starts_with("0:0,0,"));
    }
}
