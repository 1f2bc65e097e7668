use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use super::space::SparseMatrix;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Largest dimension accepted by the dense oracles.
pub const DENSE_MAX_DIM: usize = 4096;

/// A top eigenpair with its achieved residual `||A x - lambda x|| / ||x||`.
#[derive(Clone, Debug, Serialize)]
pub struct EigenResult {
    pub value: f64,
    #[serde(skip)]
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(a: &SparseMatrix, x: &[f64], lambda: f64) -> f64 {
    let mut ax = vec![0.0; x.len()];
    a.matvec(x, &mut ax);
    let r: f64 = ax
        .iter()
        .zip(x)
        .map(|(u, v)| (u - lambda * v).powi(2))
        .sum();
    r.sqrt() / norm(x)
}

/// Positive start vector with a fixed pseudo-random perturbation.
fn start_vector(n: usize) -> Vec<f64> {
    let mut rng = RngStream::new(0x5eed, 0).rng();
    let mut v: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Largest eigenvalue of a symmetric matrix by Lanczos with full
/// reorthogonalization, stopped when the true residual is at most `tol`.
pub fn lanczos_top(a: &SparseMatrix, tol: f64, max_iter: usize) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let n = a.dim();
    let m_max = max_iter.min(n).max(1);
    let mut basis: Vec<Vec<f64>> = vec![start_vector(n)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best = (f64::NAN, f64::INFINITY);
    for k in 0..m_max {
        a.matvec(&basis[k], &mut w);
        let ak = dot(&basis[k], &w);
        alpha.push(ak);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bk = norm(&w);
        let m = alpha.len();
        let exhausted = bk <= 1e-13 * alpha.iter().fold(1.0f64, |s, v| s.max(v.abs())) || m == n;
        if m.is_multiple_of(4) || exhausted || m == m_max {
            let t = DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
                0 => alpha[i],
                1 => beta[i.min(j)],
                _ => 0.0,
            });
            let eig = SymmetricEigen::new(t);
            let (idx, &theta) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.total_cmp(y.1))
                .expect("non-empty tridiagonal");
            let s = eig.eigenvectors.column(idx);
            if (bk * s[m - 1]).abs() <= 0.5 * tol || exhausted || m == m_max {
                let mut x = vec![0.0; n];
                for (j, q) in basis.iter().enumerate() {
                    x.iter_mut().zip(q).for_each(|(u, v)| *u += s[j] * v);
                }
                let r = residual(a, &x, theta);
                best = (theta, r);
                if r <= tol {
                    let sign = if x.iter().sum::<f64>() < 0.0 {
                        -1.0
                    } else {
                        1.0
                    };
                    let scale = sign / norm(&x);
                    x.iter_mut().for_each(|u| *u *= scale);
                    return Ok(EigenResult {
                        value: theta,
                        vector: x,
                        residual: r,
                        iterations: m,
                    });
                }
            }
        }
        if exhausted {
            break;
        }
        beta.push(bk);
        basis.push(w.iter().map(|x| x / bk).collect());
    }
    Err(Error::NonConvergence {
        method: "Lanczos",
        detail: format!(
            "best Ritz value {} with residual {:.3e} after {} steps",
            best.0,
            best.1,
            alpha.len()
        ),
    })
}

/// Perron root of a matrix with non-negative off-diagonal entries by power
/// iteration on `A + c I`, `c` making the diagonal strictly positive.
pub fn power_top(a: &SparseMatrix, tol: f64, max_iter: usize) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let n = a.dim();
    for r in 0..n {
        if a.row(r).any(|(c, v)| c != r && v < 0.0) {
            return Err(Error::arg(
                "power iteration needs non-negative off-diagonal entries",
            ));
        }
    }
    let shift = 1.0 - a.diagonal().iter().copied().fold(0.0, f64::min);
    let mut x = start_vector(n);
    let mut y = vec![0.0; n];
    let mut last = (f64::NAN, f64::INFINITY);
    for it in 1..=max_iter {
        a.matvec(&x, &mut y);
        y.iter_mut().zip(&x).for_each(|(u, v)| *u += shift * v);
        let mu = dot(&x, &y);
        let r: f64 = y
            .iter()
            .zip(&x)
            .map(|(u, v)| (u - mu * v).powi(2))
            .sum::<f64>()
            .sqrt();
        last = (mu - shift, r);
        if r <= tol {
            return Ok(EigenResult {
                value: mu - shift,
                vector: x,
                residual: r,
                iterations: it,
            });
        }
        let s = norm(&y);
        x.iter_mut().zip(&y).for_each(|(u, v)| *u = v / s);
    }
    Err(Error::NonConvergence {
        method: "power iteration",
        detail: format!(
            "estimate {} with residual {:.3e} after {max_iter} iterations",
            last.0, last.1
        ),
    })
}

fn check_dense(a: &SparseMatrix) -> Result<DMatrix<f64>> {
    if a.dim() > DENSE_MAX_DIM {
        return Err(Error::DimensionOverflow {
            dim: a.dim(),
            cap: DENSE_MAX_DIM,
        });
    }
    Ok(a.to_dense())
}

/// Dense symmetric oracle: the largest eigenvalue.
pub fn dense_symmetric_top(a: &SparseMatrix) -> Result<f64> {
    let m = check_dense(a)?;
    Ok(SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Dense general oracle: the largest real part over all eigenvalues.
pub fn dense_general_top(a: &SparseMatrix) -> Result<f64> {
    let m = check_dense(a)?;
    Ok(m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// All eigenvalues of a symmetric matrix, descending.
pub fn dense_symmetric_spectrum(a: &SparseMatrix) -> Result<Vec<f64>> {
    let m = check_dense(a)?;
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> SparseMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, -2.0)];
                if i > 0 {
                    r.push((i - 1, 1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, 1.0));
                }
                r
            })
            .collect();
        SparseMatrix::from_rows(rows)
    }

    #[test]
    fn lanczos_on_path_laplacian() {
        let n = 60;
        let a = path_laplacian(n);
        let exact = -2.0 + 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let r = lanczos_top(&a, 1e-10, 500).unwrap();
        assert!((r.value - exact).abs() < 1e-10);
        assert!((dense_symmetric_top(&a).unwrap() - exact).abs() < 1e-12);
        assert!((power_top(&a, 1e-11, 200_000).unwrap().value - exact).abs() < 1e-9);
    }

    #[test]
    fn power_on_nonsymmetric() {
        let a = SparseMatrix::from_rows(vec![vec![(0, -1.0), (1, 1.0)], vec![(0, 4.0), (1, -2.0)]]);
        // eigenvalues of [[-1,1],[4,-2]]: (-3 +- sqrt(17)) / 2
        let exact = (-3.0 + 17f64.sqrt()) / 2.0;
        assert!((power_top(&a, 1e-12, 10_000).unwrap().value - exact).abs() < 1e-11);
        assert!((dense_general_top(&a).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_reports_residual() {
        let a = path_laplacian(200);
        match lanczos_top(&a, 1e-14, 3) {
            Err(Error::NonConvergence { detail, .. }) => assert!(detail.contains("residual")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            power_top(&a, 1e-12, 5),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn negative_off_diagonal_rejected() {
        let a = SparseMatrix::from_rows(vec![vec![(1, -1.0)], vec![(0, -1.0)]]);
        assert!(power_top(&a, 1e-8, 10).is_err());
    }
}
