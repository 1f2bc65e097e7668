//! The acceptance suite: fourteen numbered checks combining exact small-instance
//! identities, oracle comparisons and loose one-sided envelope checks.
//!
//! Each check returns a [`CriterionOutcome`]; nothing here panics on a failed
//! comparison. [`SuiteSize::Quick`] shrinks replica counts for smoke runs;
//! tolerances never change with the size.

use std::time::Instant;

use serde::Serialize;

use crate::asymptotics::{
    envelope_no_dormancy, expected_range_mc, fit_scale, green_function_d3, green_function_d3_mc,
    growth_rate_d12, jensen_vacancy_bound, rate_bound_d3, Scale, SeriesPoint,
};
use crate::error::Result;
use crate::estimate::pooled_stderr;
use crate::fk::{
    comparison_harness, estimate_annealed_u, estimate_annealed_u_stirring, estimate_branching_mean,
    estimate_on_traces, estimate_quenched_u, sample_switch_walk,
};
use crate::model::{ModelParams, RatePair};
use crate::pam::{solve_quenched, solve_quenched_dense, DEFAULT_TOL};
use crate::replicas::replicate;
use crate::rng::RngStream;
use crate::spectral::{
    assemble_generator, constant_profile_bound, dense_annealed_u, dense_general_top,
    dense_symmetric_top, f_epsilon_bound, lanczos_top, power_top, Flavor,
};
use crate::ssep::{sample_initial, simulate_ssep, stationarity_stats, vacancy_probability_mc};
use crate::switching::{legendre_growth_rate, simulate_alpha, two_state_eigen, two_state_mgf};
use crate::torus::TorusSpec;

/// Replica budget of a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteSize {
    Full,
    Quick,
}

impl SuiteSize {
    fn n(self, full: u64, quick: u64) -> u64 {
        match self {
            SuiteSize::Full => full,
            SuiteSize::Quick => quick,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    /// `[PASS]  4 title: detail (1.2 s)`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub const TITLES: [&str; 14] = [
    "Legendre-Perron duality",
    "two-state Feynman-Kac MC",
    "change-of-measure spectral shift",
    "finite-torus growth identity",
    "Rayleigh-Ritz",
    "PAM solver",
    "SSEP correctness",
    "comparison inequality",
    "range asymptotics",
    "clumping lower bound",
    "survival scaling d=1",
    "Green's function",
    "branching vs Feynman-Kac",
    "closed-form discrepancy report",
];

/// Runs one criterion (1-based). Errors from the numerics become failed outcomes.
pub fn run_criterion(id: u32, size: SuiteSize, seed: u64) -> CriterionOutcome {
    let start = Instant::now();
    let result = match id {
        1 => c1(),
        2 => c2(size, seed),
        3 => c3(),
        4 => c4(size, seed),
        5 => c5(seed),
        6 => c6(size, seed),
        7 => c7(size, seed),
        8 => c8(size, seed),
        9 => c9(size, seed),
        10 => c10(size, seed),
        11 => c11(size, seed),
        12 => c12(size, seed),
        13 => c13(size, seed),
        14 => c14(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        title: TITLES.get(id as usize - 1).copied().unwrap_or("unknown"),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs all criteria in order.
pub fn run_all(size: SuiteSize, seed: u64) -> Vec<CriterionOutcome> {
    (1..=14).map(|id| run_criterion(id, size, seed)).collect()
}

type Check = Result<(bool, String)>;

fn shared() -> ModelParams {
    ModelParams::default()
}

fn c1() -> Check {
    let vals = [0.25, 1.0, 4.0];
    let mut worst: f64 = 0.0;
    for g in [-4.0, 1.0, 4.0] {
        for s0 in vals {
            for s1 in vals {
                let r = RatePair::new(s0, s1)?;
                worst = worst.max((legendre_growth_rate(g, r) - two_state_eigen(g, r)).abs());
            }
        }
    }
    let r = RatePair::new(1.0, 1.0)?;
    let (l, e) = (legendre_growth_rate(1.0, r), two_state_eigen(1.0, r));
    let target = 0.618_033_988_7;
    let ok = worst <= 1e-9 && (l - target).abs() <= 1e-9 && (e - target).abs() <= 1e-9;
    Ok((
        ok,
        format!(
            "max |legendre - perron| = {worst:.2e}; at (1,1,1) legendre {l:.12}, perron {e:.12}"
        ),
    ))
}

fn c2(size: SuiteSize, seed: u64) -> Check {
    let (t, g) = (2.0, 1.0);
    let rates = RatePair::new(1.0, 1.0)?;
    let est = replicate(seed, size.n(1_000_000, 100_000), |rng| {
        let path = simulate_alpha(rates, t, rng)?;
        Ok((g * path.local_times(t).1).exp())
    })?;
    let exact = two_state_mgf(g, rates, t);
    let z = (est.mean() - exact) / est.stderr();
    Ok((
        z.abs() <= 3.0,
        format!(
            "MC {:.6} +- {:.1e}, exact {exact:.6}, z = {z:.2}",
            est.mean(),
            est.stderr()
        ),
    ))
}

fn c3() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for side in [3, 4] {
        let params = ModelParams {
            side,
            s1: 2.0,
            ..shared()
        };
        let orig = assemble_generator(&params, Flavor::Original)?;
        let sym = assemble_generator(&params, Flavor::Symmetrized)?;
        let power = power_top(&orig.matrix, 1e-13, 5_000_000)?.value;
        let lanczos = lanczos_top(&sym.matrix, 1e-13, 2000)?.value;
        let dense_o = dense_general_top(&orig.matrix)?;
        let dense_s = dense_symmetric_top(&sym.matrix)?;
        let defect = (dense_o - dense_s - orig.shift()).abs();
        let solver = (power - dense_o).abs().max((lanczos - dense_s).abs());
        ok &= defect <= 1e-8 && solver <= 1e-8;
        parts.push(format!(
            "L={side}: shift defect {defect:.1e}, solver gap {solver:.1e}"
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn c4(size: SuiteSize, seed: u64) -> Check {
    let params = shared();
    let pb = assemble_generator(&params, Flavor::Original)?;
    let u = dense_annealed_u(&pb, &[8.0, 16.0, 5.0])?;
    let lambda = dense_general_top(&pb.matrix)?;
    let slope = (u[1].ln() - u[0].ln()) / 8.0;
    let growth_gap = slope - lambda;
    let est = estimate_annealed_u(
        &ModelParams { t: 5.0, ..params },
        size.n(100_000, 20_000),
        seed,
    )?;
    let z = (est.mean() - u[2]) / est.stderr();
    let ok = growth_gap.abs() <= 1e-3 && z.abs() <= 3.0;
    Ok((
        ok,
        format!(
            "slope(8,16) {slope:.6} vs lambda_max {lambda:.6} (gap {growth_gap:.2e}, tol 1e-3); \
             U(5) dense {:.6}, MC {:.6} (z = {z:.2})",
            u[2],
            est.mean()
        ),
    ))
}

fn c5(seed: u64) -> Check {
    use rand::Rng;
    let params = shared();
    let sym = assemble_generator(&params, Flavor::Symmetrized)?;
    let top = lanczos_top(&sym.matrix, 1e-13, 2000)?;
    let lambda = top.value;
    let mut worst = f64::NEG_INFINITY;
    let mut rng = RngStream::new(seed, 0).rng();
    for _ in 0..100 {
        let g: Vec<f64> = (0..sym.dim())
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        worst = worst.max(sym.rayleigh_weighted(&g) - lambda);
    }
    let lambda_orig = lambda + sym.shift();
    let mut profile_worst = f64::NEG_INFINITY;
    for k in 0..=20 {
        let a1 = k as f64 / 20.0;
        profile_worst = profile_worst.max(constant_profile_bound(a1, &sym)? - lambda_orig);
        for eps in [0.5, 0.25, 0.1] {
            profile_worst =
                profile_worst.max(f_epsilon_bound(eps, 1.0 - a1, a1, &sym)?.value - lambda_orig);
        }
    }
    let at_vector = (sym.rayleigh_weighted(&top.vector) - lambda).abs();
    let ok = worst <= 1e-10 && profile_worst <= 1e-10 && at_vector <= 1e-8;
    Ok((
        ok,
        format!(
            "random max(R - lambda) {worst:.3e}; profile sweeps max(bound - lambda) {profile_worst:.3e}; \
             |R(v) - lambda| {at_vector:.1e}"
        ),
    ))
}

fn random_trace(params: &ModelParams, horizon: f64, seed: u64) -> Result<crate::ssep::EnvTrace> {
    let torus = params.torus();
    let mut rng = RngStream::new(seed, u64::MAX).rng();
    let init = sample_initial(&torus, params.p, &mut rng);
    simulate_ssep(init, &torus, params.rho, horizon, &mut rng)
}

fn c6(size: SuiteSize, seed: u64) -> Check {
    let free = ModelParams {
        side: 16,
        gamma: 0.0,
        s0: 0.5,
        s1: 2.0,
        t: 10.0,
        ..shared()
    };
    let mass =
        solve_quenched(&random_trace(&free, 10.0, seed)?, &free, 10.0, DEFAULT_TOL)?.total_mass();
    let mass_err = (mass - 1.0).abs();

    let pam = ModelParams {
        side: 16,
        gamma: 1.0,
        s1: 2.0,
        t: 2.0,
        ..shared()
    };
    let tr = random_trace(&pam, 2.0, seed + 1)?;
    let rk = solve_quenched(&tr, &pam, 2.0, 1e-10)?;
    let dense = solve_quenched_dense(&tr, &pam, 2.0)?;
    let oracle = rk.max_abs_diff(&dense);

    let small = ModelParams {
        t: 3.0,
        s1: 2.0,
        ..shared()
    };
    let tr = random_trace(&small, 3.0, seed + 2)?;
    let m = solve_quenched(&tr, &small, 3.0, DEFAULT_TOL)?.total_mass();
    let fk = estimate_quenched_u(&tr, &small, size.n(100_000, 20_000), seed)?;
    let z = (fk.mean() - m) / fk.stderr();
    let ok = mass_err <= 1e-8 && oracle <= 1e-7 && z.abs() <= 3.0;
    Ok((
        ok,
        format!("|U(10) - 1| {mass_err:.1e}; RK vs dense {oracle:.1e}; quenched FK {:.5} vs PAM {m:.5} (z = {z:.2})", fk.mean()),
    ))
}

fn c7(size: SuiteSize, seed: u64) -> Check {
    let torus = TorusSpec::new(1, 200)?;
    let p = 0.3;
    let st = stationarity_stats(&torus, p, 1.0, 50.0, size.n(10_000, 2_000), seed)?;
    let m = &st.site_marginal;
    let z_marg = (m.mean() - p) / m.stderr();
    let params = ModelParams {
        side: 20,
        gamma: -1.0,
        p,
        t: 2.0,
        ..shared()
    };
    let n = size.n(20_000, 5_000);
    let fwd = estimate_on_traces(&params, n, seed + 1, false)?;
    let rev = estimate_on_traces(&params, n, seed + 2, true)?;
    let z_rev = (fwd.mean() - rev.mean()) / pooled_stderr(&fwd, &rev);
    let ok = st.count_violations == 0 && z_marg.abs() <= 3.0 && z_rev.abs() <= 3.0;
    Ok((
        ok,
        format!(
            "count violations {}; marginal {:.4} (z = {z_marg:.2}); forward vs reversed z = {z_rev:.2}",
            st.count_violations,
            m.mean()
        ),
    ))
}

fn c8(size: SuiteSize, seed: u64) -> Check {
    let params = ModelParams {
        side: 100,
        p: 0.3,
        gamma: -1.0,
        t: 10.0,
        ..shared()
    };
    let path = sample_switch_walk(&params, &mut RngStream::new(seed, u64::MAX).rng())?;
    let r = comparison_harness(&params, &path, size.n(100_000, 10_000), seed)?;
    Ok((
        r.holds(3.0),
        format!(
            "ssep {:.5} vs independent {:.5} (z = {:.2}, one-sided)",
            r.ssep.mean, r.indep.mean, r.z
        ),
    ))
}

fn c9(size: SuiteSize, seed: u64) -> Check {
    let t = 400.0;
    let e = expected_range_mc(1, 1.0, t, size.n(10_000, 2_000), seed)?;
    let ratio = e.mean() / t.sqrt();
    Ok((
        (2.03..=2.48).contains(&ratio),
        format!(
            "E[R_t]/sqrt(t) = {ratio:.4} (+- {:.4})",
            e.stderr() / t.sqrt()
        ),
    ))
}

fn c10(size: SuiteSize, seed: u64) -> Check {
    let (p, t) = (0.3, 20.0);
    let torus = TorusSpec::new(1, 200)?;
    let q = torus.centered_box(1);
    let range = expected_range_mc(1, 1.0, t, size.n(20_000, 5_000), seed)?.mean();
    let bound = jensen_vacancy_bound(p, q.len(), range);
    let vac = vacancy_probability_mc(&torus, p, 1.0, &q, t, size.n(100_000, 20_000), seed + 1)?;
    let ok = vac.mean() >= bound - 2.0 * vac.stderr();
    Ok((
        ok,
        format!(
            "vacancy {:.5} +- {:.1e} vs bound {bound:.5} (E[R_t] = {range:.3})",
            vac.mean(),
            vac.stderr()
        ),
    ))
}

/// Fitted slope of `-log <U>` against `sqrt(t)`, from the conditional
/// (stirring) estimator; plain weights are hopelessly heavy-tailed here.
fn survival_slope(params: &ModelParams, grid: &[f64], n: u64, seed: u64) -> Result<f64> {
    let est = estimate_annealed_u_stirring(params, grid, n, seed)?;
    let series: Vec<SeriesPoint> = grid
        .iter()
        .zip(&est)
        .map(|(&t, e)| SeriesPoint {
            t,
            value: -e.log_mean(),
            stderr: e.log_mean_stderr(),
        })
        .collect();
    Ok(fit_scale(&series, Scale::Sqrt)?.slope)
}

fn c11(size: SuiteSize, seed: u64) -> Check {
    let grid = [25.0, 50.0, 100.0, 200.0, 400.0];
    let base = ModelParams {
        side: 200,
        p: 0.3,
        gamma: -2.0,
        t: 400.0,
        s1: 0.0,
        ..shared()
    };
    let n = size.n(100_000, 5_000);
    let plain = survival_slope(&base, &grid, n, seed)?;
    let dormant = survival_slope(
        &ModelParams {
            s1: 1.0,
            ..base.clone()
        },
        &grid,
        n,
        seed + 1,
    )?;
    let env = envelope_no_dormancy(1, &base)?;
    let ratio = dormant / plain;
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let ok = (0.5 * env.lo..=1.5 * env.hi).contains(&plain)
        && (0.75 * target..=1.25 * target).contains(&ratio);
    Ok((
        ok,
        format!(
            "slope {plain:.4} in [{:.4}, {:.4}]; dormant slope {dormant:.4}, ratio {ratio:.4} vs {target:.5} +- 25%",
            0.5 * env.lo,
            1.5 * env.hi
        ),
    ))
}

fn c12(size: SuiteSize, seed: u64) -> Check {
    let g = green_function_d3()?;
    let mc = green_function_d3_mc(100.0, size.n(100_000, 20_000), seed)?;
    let mc_ok = (mc.value - g.value).abs() <= 3.0 * mc.stderr + mc.error_bound;
    let bound = rate_bound_d3(&ModelParams {
        d: 3,
        p: 0.5,
        gamma: -1.0,
        ..shared()
    })?;
    let ok =
        (g.value - 0.252731).abs() <= 1e-5 && mc_ok && (bound.no_dormancy - 0.39913).abs() <= 1e-4;
    Ok((
        ok,
        format!(
            "G = {:.7}; MC {:.5} +- {:.1e} (tail {:.1e}); rate bound {:.5}",
            g.value, mc.value, mc.stderr, mc.error_bound, bound.no_dormancy
        ),
    ))
}

fn c13(size: SuiteSize, seed: u64) -> Check {
    let params = ModelParams {
        side: 50,
        ..shared()
    };
    let n = size.n(100_000, 20_000);
    let branching = estimate_branching_mean(&params, n, seed)?;
    let fk = estimate_annealed_u(&params, n, seed + 1)?;
    let z = (branching.mean() - fk.mean()) / pooled_stderr(&branching, &fk);
    Ok((
        z.abs() <= 3.0,
        format!(
            "branching {:.5} vs FK {:.5} (z = {z:.2})",
            branching.mean(),
            fk.mean()
        ),
    ))
}

fn c14() -> Check {
    let g = growth_rate_d12(&shared())?;
    Ok((
        true,
        format!(
            "legendre {:.10}, printed closed form {:.10}, difference {:.10} (reported only)",
            g.legendre, g.printed, g.printed_minus_legendre
        ),
    ))
}
