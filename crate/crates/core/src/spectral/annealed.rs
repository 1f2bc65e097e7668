use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::problem::{Flavor, SpectralProblem};
use crate::error::{Error, Result};

/// Exact annealed total mass `U(t) = sum_c nu(c) [exp(t M) 1](c, 0, active)`
/// on the enumerated space, for each requested time.
///
/// Uses the spectral decomposition of the symmetrized matrix, shifted back
/// by `sqrt(s0 s1)` and conjugated with the type scaling that links the two
/// flavors.
pub fn dense_annealed_u(problem: &SpectralProblem, times: &[f64]) -> Result<Vec<f64>> {
    if problem.flavor != Flavor::Original {
        return Err(Error::arg("dense annealed mass needs the original problem"));
    }
    if problem.dim() > super::eigen::DENSE_MAX_DIM {
        return Err(Error::DimensionOverflow {
            dim: problem.dim(),
            cap: super::eigen::DENSE_MAX_DIM,
        });
    }
    let m = problem.matrix.to_dense();
    let space = &problem.space;
    let sqrt_nu: DVector<f64> =
        DVector::from_iterator(problem.dim(), problem.weights.iter().map(|w| w.sqrt()));
    let mut start = DVector::zeros(problem.dim());
    for c in 0..space.n_configs() {
        let s = space.index(c, 0, 1);
        start[s] = sqrt_nu[s];
    }
    times
        .iter()
        .map(|&t| {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::arg(format!(
                    "time must be finite and non-negative, got {t}"
                )));
            }
            Ok(start.dot(&((&m * t).exp() * &sqrt_nu)))
        })
        .collect()
}

/// Same quantity through the eigen-decomposition of a symmetric similarity
/// transform; independent of the matrix exponential.
pub fn spectral_annealed_u(problem: &SpectralProblem, times: &[f64]) -> Result<Vec<f64>> {
    if problem.flavor != Flavor::Original {
        return Err(Error::arg(
            "spectral annealed mass needs the original problem",
        ));
    }
    let (s0, s1) = (problem.params.s0, problem.params.s1);
    if s0 <= 0.0 || s1 <= 0.0 {
        return Err(Error::arg("type similarity needs positive switching rates"));
    }
    // T M T^{-1} is symmetric for T = diag(sqrt(s1), sqrt(s0)) on (dormant, active)
    let t_scale: Vec<f64> = (0..problem.dim())
        .map(|s| if s % 2 == 1 { s0.sqrt() } else { s1.sqrt() })
        .collect();
    let m = problem.matrix.similarity(&t_scale).to_dense();
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let space = &problem.space;
    let dim = problem.dim();
    let sqrt_nu: Vec<f64> = problem.weights.iter().map(|w| w.sqrt()).collect();
    let right = DVector::from_iterator(dim, (0..dim).map(|s| t_scale[s] * sqrt_nu[s]));
    let mut left = DVector::zeros(dim);
    for c in 0..space.n_configs() {
        let s = space.index(c, 0, 1);
        left[s] = sqrt_nu[s] / t_scale[s];
    }
    let vl = eig.eigenvectors.transpose() * left;
    let vr = eig.eigenvectors.transpose() * right;
    Ok(times
        .iter()
        .map(|&t| {
            (0..dim)
                .map(|k| vl[k] * vr[k] * (eig.eigenvalues[k] * t).exp())
                .sum()
        })
        .collect())
}

/// `DMatrix` view of the original generator plus potential, for callers that
/// want their own exponentials.
pub fn dense_operator(problem: &SpectralProblem) -> DMatrix<f64> {
    problem.matrix.to_dense()
}
