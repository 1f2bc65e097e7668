use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::numeric::{gauss_legendre, golden_section_min};
use crate::replicas::replicate;
use crate::rng::exp_time;

/// How a Green value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GreenMethod {
    Quadrature,
    MonteCarlo,
}

/// `G_3(0)` for the walk with generator `c * Delta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreenValue {
    pub value: f64,
    pub method: GreenMethod,
    /// Absolute error bound (quadrature) or deterministic truncation bias bound (MC).
    pub error_bound: f64,
    /// MC standard error, zero for quadrature.
    pub stderr: f64,
}

impl GreenValue {
    /// Green value of the walk sped up by `c`.
    pub fn rescaled(&self, c: f64) -> GreenValue {
        GreenValue {
            value: self.value / c,
            error_bound: self.error_bound / c,
            stderr: self.stderr / c,
            ..*self
        }
    }
}

/// `exp(-x) I_0(x)` for `x >= 0`.
pub fn scaled_bessel_i0(x: f64) -> f64 {
    if x <= 15.0 {
        let q = 0.25 * x * x;
        let (mut term, mut sum, mut k) = (1.0, 1.0, 1.0);
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        let (mut c, mut sum, mut pow) = (1.0, 1.0, 1.0);
        for k in 1..30 {
            let kf = k as f64;
            c *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf);
            pow /= x;
            let term = c * pow;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// Return density `p_u(0) = (exp(-2u) I_0(2u))^3` of the rate-1-per-neighbour walk on Z^3.
fn return_density(u: f64) -> f64 {
    scaled_bessel_i0(2.0 * u).powi(3)
}

/// Coefficients of `(sqrt(2 pi x) e^{-x} I_0(x))^3` in powers of `1/x`.
fn cubed_asymptotic(terms: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    for k in 1..terms {
        let kf = k as f64;
        a.push(a[k - 1] * (2.0 * kf - 1.0).powi(2) / (8.0 * kf));
    }
    let conv = |x: &[f64], y: &[f64]| -> Vec<f64> {
        (0..terms)
            .map(|k| (0..=k).map(|j| x[j] * y[k - j]).sum())
            .collect()
    };
    conv(&conv(&a, &a), &a)
}

const TAIL_START: f64 = 200.0;

/// Analytic `int_U^inf p_u(0) du` from the large-`u` expansion.
fn tail_integral(from: f64) -> f64 {
    let b = cubed_asymptotic(8);
    let lead = (4.0 * std::f64::consts::PI).powf(-1.5);
    lead * b
        .iter()
        .enumerate()
        .map(|(k, bk)| bk * 0.5f64.powi(k as i32) * from.powf(-0.5 - k as f64) / (k as f64 + 0.5))
        .sum::<f64>()
}

/// `G_3(0) = int_0^inf (exp(-2u) I_0(2u))^3 du` by composite Gauss–Legendre
/// on `[0, 200]` and an asymptotic tail.
pub fn green_function_d3() -> Result<GreenValue> {
    let coarse = integrate(20);
    let fine = integrate(40);
    let err = (fine - coarse).abs() + 1e-12;
    if err > 1e-6 * fine {
        return Err(Error::NonConvergence {
            method: "Green quadrature",
            detail: format!("panel estimates differ by {err:e}"),
        });
    }
    Ok(GreenValue {
        value: fine,
        method: GreenMethod::Quadrature,
        error_bound: err,
        stderr: 0.0,
    })
}

fn integrate(order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let mut breaks: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
    let mut b = 10.0;
    while b < TAIL_START {
        b = (b * 1.25).min(TAIL_START);
        breaks.push(b);
    }
    let body: f64 = breaks
        .windows(2)
        .map(|w| {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            half * nodes
                .iter()
                .zip(&weights)
                .map(|(x, wt)| wt * return_density(mid + half * x))
                .sum::<f64>()
        })
        .sum();
    body + tail_integral(TAIL_START)
}

/// Monte Carlo: mean time a rate-6 walk on Z^3 spends at the origin up to
/// `horizon`. The missing tail is reported as `error_bound`.
pub fn green_function_d3_mc(horizon: f64, n: u64, seed: u64) -> Result<GreenValue> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::arg("horizon must be positive"));
    }
    let est: Estimate = replicate(seed, n, |rng| Ok(origin_time(horizon, rng)))?;
    Ok(GreenValue {
        value: est.mean(),
        method: GreenMethod::MonteCarlo,
        error_bound: tail_integral(horizon) * 1.01,
        stderr: est.stderr(),
    })
}

fn origin_time<R: Rng + ?Sized>(horizon: f64, rng: &mut R) -> f64 {
    let mut pos = [0i64; 3];
    let (mut now, mut total) = (0.0, 0.0);
    loop {
        let dt = exp_time(rng, 6.0);
        let at_origin = pos == [0, 0, 0];
        if now + dt >= horizon {
            if at_origin {
                total += horizon - now;
            }
            return total;
        }
        if at_origin {
            total += dt;
        }
        now += dt;
        let dir = rng.random_range(0..6);
        pos[dir / 2] += if dir % 2 == 0 { 1 } else { -1 };
    }
}

/// Lower bounds on the d = 3 decay rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateBoundD3 {
    /// `p rho / (rho / |gamma| + G)`.
    pub no_dormancy: f64,
    /// `inf_a { s0 - sqrt(s0 s1) + (s1 - s0 + B) a - 2 sqrt(s0 s1 a (1 - a)) }` with `B` the bound above.
    pub dormancy: f64,
    pub argmin: f64,
    pub green: f64,
}

pub fn rate_bound_d3(params: &crate::model::ModelParams) -> Result<RateBoundD3> {
    if params.d != 3 {
        return Err(Error::arg(format!(
            "rate bound is for d = 3, got d = {}",
            params.d
        )));
    }
    if !(params.gamma < 0.0) {
        return Err(Error::arg("rate bound needs gamma < 0"));
    }
    let g = green_function_d3()?.value;
    let (p, rho, s0, s1) = (params.p, params.rho, params.s0, params.s1);
    let b = p * rho / (rho / params.gamma.abs() + g);
    let sym = (s0 * s1).sqrt();
    let objective =
        |a: f64| s0 - sym + (s1 - s0 + b) * a - 2.0 * (s0 * s1 * a * (1.0 - a)).max(0.0).sqrt();
    let (argmin, dormancy) = golden_section_min(objective, 0.0, 1.0, 1e-12);
    Ok(RateBoundD3 {
        no_dormancy: b,
        dormancy,
        argmin,
        green: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn watson_over_six() -> f64 {
        let g = statrs::function::gamma::gamma;
        let w = 6f64.sqrt() / (32.0 * std::f64::consts::PI.powi(3))
            * g(1.0 / 24.0)
            * g(5.0 / 24.0)
            * g(7.0 / 24.0)
            * g(11.0 / 24.0);
        w / 6.0
    }

    #[test]
    fn bessel_branches_agree() {
        // series past its switch point vs the asymptotic branch
        let x = 15.0;
        let q = 0.25 * x * x;
        let (mut term, mut sum) = (1.0f64, 1.0f64);
        for k in 1..200 {
            term *= q / (k * k) as f64;
            sum += term;
        }
        let series = sum * (-x).exp();
        let below = scaled_bessel_i0(x);
        assert!((series - below).abs() < 1e-15);
        assert!((scaled_bessel_i0(15.000001) - below).abs() < 1e-7);
        assert_eq!(scaled_bessel_i0(0.0), 1.0);
    }

    #[test]
    fn quadrature_matches_watson() {
        let g = green_function_d3().unwrap();
        let exact = watson_over_six();
        assert!((exact - 0.252731).abs() < 1e-6);
        assert!(
            (g.value - exact).abs() < 1e-9 * exact,
            "{} vs {exact}",
            g.value
        );
        assert!(g.error_bound < 1e-6 * exact);
    }

    #[test]
    fn monte_carlo_agrees() {
        let g = green_function_d3().unwrap();
        let mc = green_function_d3_mc(100.0, 40_000, 3).unwrap();
        assert!((mc.value - g.value).abs() <= 3.0 * mc.stderr + mc.error_bound);
        assert!(mc.value < g.value + 3.0 * mc.stderr);
    }

    #[test]
    fn rescaling() {
        let g = green_function_d3().unwrap();
        assert!((g.rescaled(2.0).value - g.value / 2.0).abs() < 1e-16);
    }

    #[test]
    fn rate_bound_values() {
        let params = ModelParams {
            d: 3,
            p: 0.5,
            rho: 1.0,
            gamma: -1.0,
            ..Default::default()
        };
        let r = rate_bound_d3(&params).unwrap();
        assert!((r.no_dormancy - 0.39913).abs() < 1e-4);
        let limit = rate_bound_d3(&ModelParams {
            s1: 1e-12,
            ..params.clone()
        })
        .unwrap();
        assert!((limit.dormancy - limit.no_dormancy).abs() < 1e-5);
        assert!(rate_bound_d3(&ModelParams {
            gamma: 1.0,
            ..params.clone()
        })
        .is_err());
        assert!(rate_bound_d3(&ModelParams { d: 1, ..params }).is_err());
    }

    #[test]
    fn dormancy_never_exceeds_plain_bound() {
        for s0 in [0.1, 1.0, 5.0] {
            for s1 in [0.1, 1.0, 5.0] {
                for gamma in [-0.5, -2.0] {
                    let params = ModelParams {
                        d: 3,
                        p: 0.3,
                        gamma,
                        s0,
                        s1,
                        ..Default::default()
                    };
                    let r = rate_bound_d3(&params).unwrap();
                    assert!(r.dormancy <= r.no_dormancy + 1e-12);
                }
            }
        }
    }
}
