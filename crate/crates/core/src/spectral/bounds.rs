use serde::Serialize;

use super::forms::quadratic_forms;
use super::problem::SpectralProblem;
use super::space::occupied;
use crate::error::{Error, Result};
use crate::numeric::golden_section_max;

fn check_fractions(a0: f64, a1: f64) -> Result<()> {
    if !((0.0..=1.0).contains(&a0) && (0.0..=1.0).contains(&a1) && (a0 + a1 - 1.0).abs() <= 1e-12) {
        return Err(Error::arg(format!(
            "need a0, a1 in [0, 1] with a0 + a1 = 1, got ({a0}, {a1})"
        )));
    }
    Ok(())
}

/// Test function `f(c, z, i) = sqrt(a_i / N)`.
pub fn constant_profile(a1: f64, problem: &SpectralProblem) -> Result<Vec<f64>> {
    check_fractions(1.0 - a1, a1)?;
    let n = problem.space.n_sites() as f64;
    let amp = [((1.0 - a1) / n).sqrt(), (a1 / n).sqrt()];
    Ok((0..problem.dim()).map(|s| amp[s % 2]).collect())
}

/// `sqrt(s0 s1)` plus the Rayleigh value of the constant profile: a lower
/// bound on the growth rate of the original problem.
pub fn constant_profile_bound(a1: f64, problem: &SpectralProblem) -> Result<f64> {
    let f = constant_profile(a1, problem)?;
    Ok(problem.shift() + quadratic_forms(&f, problem)?.rayleigh())
}

/// Maximises [`constant_profile_bound`] over `a1`; returns `(a1, bound)`.
pub fn best_constant_profile_bound(problem: &SpectralProblem) -> Result<(f64, f64)> {
    constant_profile_bound(0.5, problem)?;
    Ok(golden_section_max(
        |a1| constant_profile_bound(a1, problem).unwrap_or(f64::NEG_INFINITY),
        0.0,
        1.0,
        1e-10,
    ))
}

/// Terms of the perturbed test function `f_eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FEpsilon {
    pub eps: f64,
    /// Potential term.
    pub term_i: f64,
    /// Exchange energy.
    pub term_ii: f64,
    /// Walker energy.
    pub term_iii: f64,
    /// Switching energy.
    pub term_iv: f64,
    pub norm2: f64,
    /// `sqrt(s0 s1) + (I - II - III - IV) / norm2`.
    pub value: f64,
}

/// `f_eps(c, x, i) = (1 + eps c(x)) / sqrt(1 + (2 eps + eps^2) p) * phi(x, i)`
/// with the flat profile `phi(x, i) = sqrt(a_i / N)`.
pub fn f_epsilon(eps: f64, a0: f64, a1: f64, problem: &SpectralProblem) -> Result<Vec<f64>> {
    check_fractions(a0, a1)?;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::arg(format!("eps must be non-negative, got {eps}")));
    }
    let space = &problem.space;
    let n = space.n_sites() as f64;
    let p = problem.params.p;
    let norm = (1.0 + (2.0 * eps + eps * eps) * p).sqrt();
    let phi = [(a0 / n).sqrt(), (a1 / n).sqrt()];
    Ok((0..space.dim())
        .map(|s| {
            let (c, x, i) = space.decode(s);
            let bump = if occupied(c, x) { 1.0 + eps } else { 1.0 };
            bump / norm * phi[i]
        })
        .collect())
}

/// Rayleigh bound from `f_eps`, with its term breakdown.
pub fn f_epsilon_bound(eps: f64, a0: f64, a1: f64, problem: &SpectralProblem) -> Result<FEpsilon> {
    let f = f_epsilon(eps, a0, a1, problem)?;
    let q = quadratic_forms(&f, problem)?;
    Ok(FEpsilon {
        eps,
        term_i: q.a1,
        term_ii: q.a2,
        term_iii: q.a3,
        term_iv: q.a4,
        norm2: q.norm2,
        value: problem.shift() + q.rayleigh(),
    })
}

/// The small-`eps` limit expression `sqrt(s0 s1) + a1 (gamma p - s1 + s0) - s0`.
pub fn f_epsilon_limit(a1: f64, problem: &SpectralProblem) -> f64 {
    let pr = &problem.params;
    problem.shift() + a1 * (pr.gamma * pr.p - pr.s1 + pr.s0) - pr.s0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::spectral::eigen::dense_symmetric_top;
    use crate::spectral::problem::{assemble_generator, Flavor};
    use crate::switching::rate_i;

    fn problem(gamma: f64, s0: f64, s1: f64) -> SpectralProblem {
        let params = ModelParams {
            side: 4,
            p: 0.4,
            gamma,
            s0,
            s1,
            ..Default::default()
        };
        assemble_generator(&params, Flavor::Symmetrized).unwrap()
    }

    #[test]
    fn constant_profile_at_full_activity() {
        let s = 1.7;
        let pb = problem(2.0, s, s);
        let v = constant_profile_bound(1.0, &pb).unwrap();
        assert!((v - (2.0 * 0.4 - s)).abs() < 1e-12);
    }

    #[test]
    fn constant_profile_is_legendre_objective() {
        let pb = problem(1.5, 0.5, 2.0);
        for a1 in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let v = constant_profile_bound(a1, &pb).unwrap();
            let expect = a1 * 1.5 * 0.4 - rate_i(a1, pb.params.rates()).unwrap();
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn no_gain_without_potential() {
        let pb = problem(0.0, 0.5, 2.0);
        assert!(best_constant_profile_bound(&pb).unwrap().1 <= 1e-12);
    }

    #[test]
    fn bounds_below_top_eigenvalue() {
        let pb = problem(1.5, 0.5, 2.0);
        let top = pb.shift() + dense_symmetric_top(&pb.matrix).unwrap();
        assert!(best_constant_profile_bound(&pb).unwrap().1 <= top + 1e-10);
        for eps in [0.0, 0.1, 0.5, 2.0] {
            for a1 in [0.1, 0.5, 1.0] {
                assert!(f_epsilon_bound(eps, 1.0 - a1, a1, &pb).unwrap().value <= top + 1e-10);
            }
        }
    }

    #[test]
    fn zero_eps_is_constant_profile() {
        let pb = problem(1.5, 0.5, 2.0);
        let a = f_epsilon_bound(0.0, 0.3, 0.7, &pb).unwrap().value;
        let b = constant_profile_bound(0.7, &pb).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn f_epsilon_is_normalised() {
        let pb = problem(1.5, 0.5, 2.0);
        for eps in [0.1, 0.7] {
            assert!((f_epsilon_bound(eps, 0.4, 0.6, &pb).unwrap().norm2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn energies_scale_quadratically() {
        let pb = problem(1.5, 0.5, 2.0);
        let eps = [0.5, 0.25, 0.1];
        let terms: Vec<FEpsilon> = eps
            .iter()
            .map(|&e| f_epsilon_bound(e, 0.3, 0.7, &pb).unwrap())
            .collect();
        let base = f_epsilon_bound(0.0, 0.3, 0.7, &pb).unwrap();
        let slope = |pick: fn(&FEpsilon) -> f64| {
            let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
            let ys: Vec<f64> = terms
                .iter()
                .map(|t| (pick(t) - pick(&base)).abs().ln())
                .collect();
            let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
            let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            num / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
        };
        assert!(slope(|t| t.term_ii) >= 1.5);
        assert!(slope(|t| t.term_iii) >= 1.5);
        for t in &terms {
            assert!((t.term_iv - base.term_iv).abs() < 1e-13);
        }
    }

    #[test]
    fn limit_expression_at_balanced_fractions() {
        let pb = problem(1.5, 0.5, 2.0);
        let v = f_epsilon_bound(1e-7, 0.5, 0.5, &pb).unwrap().value;
        assert!((v - f_epsilon_limit(0.5, &pb)).abs() < 1e-6);
    }

    #[test]
    fn invalid_fractions() {
        let pb = problem(1.0, 1.0, 1.0);
        assert!(f_epsilon_bound(0.1, 0.5, 0.6, &pb).is_err());
        assert!(constant_profile_bound(1.2, &pb).is_err());
        assert!(f_epsilon_bound(-0.1, 0.5, 0.5, &pb).is_err());
    }
}
