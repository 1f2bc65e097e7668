use serde::Serialize;

use super::problem::SpectralProblem;
use super::space::{occupied, swap_bits};
use crate::error::{Error, Result};

/// The four quadratic forms of the variational formula, evaluated on the
/// enumerated space with Bernoulli weights.
///
/// `a1` is the potential term, `a2` the exchange energy, `a3` the walker
/// energy and `a4` the switching energy; rates match the assembled operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadForms {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub norm2: f64,
}

impl QuadForms {
    /// `(a1 - a2 - a3 - a4) / norm2`, the Rayleigh value of the symmetrized operator.
    pub fn rayleigh(&self) -> f64 {
        (self.a1 - self.a2 - self.a3 - self.a4) / self.norm2
    }
}

/// Evaluates the forms on a function `f` over states.
pub fn quadratic_forms(f: &[f64], problem: &SpectralProblem) -> Result<QuadForms> {
    let space = &problem.space;
    if f.len() != space.dim() {
        return Err(Error::arg(format!(
            "vector has length {}, expected {}",
            f.len(),
            space.dim()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("vector has non-finite entries"));
    }
    let pr = &problem.params;
    let torus = space.torus();
    let n = space.n_sites();
    let edges: Vec<(usize, usize)> = (0..torus.n_edges()).map(|e| torus.edge(e)).collect();
    let sym = (pr.s0 * pr.s1).sqrt();
    let mut q = QuadForms {
        a1: 0.0,
        a2: 0.0,
        a3: 0.0,
        a4: 0.0,
        norm2: 0.0,
    };
    for c in 0..space.n_configs() {
        let nu = space.nu(c, pr.p);
        let (mut a1, mut a2, mut a3, mut a4, mut norm) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for z in 0..n {
            for i in 0..2 {
                let v = f[space.index(c, z, i)];
                norm += v * v;
                let gain = if i == 1 && occupied(c, z) {
                    pr.gamma
                } else {
                    0.0
                };
                let loss = if i == 1 { pr.s1 } else { pr.s0 };
                a1 += (gain - loss) * v * v;
                for &(a, b) in &edges {
                    let w = f[space.index(swap_bits(c, a, b), z, i)];
                    a2 += 0.5 * pr.rho * (w - v).powi(2);
                }
            }
            let v1 = f[space.index(c, z, 1)];
            for k in 0..torus.degree() {
                let w = f[space.index(c, torus.step(z, k), 1)];
                a3 += 0.5 * pr.kappa * (w - v1).powi(2);
            }
            a4 += sym * (v1 - f[space.index(c, z, 0)]).powi(2);
        }
        q.a1 += nu * a1;
        q.a2 += nu * a2;
        q.a3 += nu * a3;
        q.a4 += nu * a4;
        q.norm2 += nu * norm;
    }
    Ok(q)
}

/// Dirichlet form `<-L f, f>_nu` of the exclusion generator on configuration
/// functions, using the particle-jump form of the generator.
pub fn ssep_dirichlet_form(g: &[f64], problem: &SpectralProblem) -> Result<f64> {
    let space = &problem.space;
    if g.len() != space.n_configs() {
        return Err(Error::arg("configuration function has the wrong length"));
    }
    let torus = space.torus();
    let rho = problem.params.rho;
    let mut total = 0.0;
    for c in 0..space.n_configs() {
        let mut lf = 0.0;
        for x in 0..space.n_sites() {
            if !occupied(c, x) {
                continue;
            }
            for k in 0..torus.degree() {
                let y = torus.step(x, k);
                if y != x && !occupied(c, y) {
                    lf += rho * (g[c ^ (1 << x) ^ (1 << y)] - g[c]);
                }
            }
        }
        total -= space.nu(c, problem.params.p) * lf * g[c];
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::rng::RngStream;
    use crate::spectral::problem::{assemble_generator, Flavor};
    use rand::Rng;

    fn problem(p: f64) -> SpectralProblem {
        let params = ModelParams {
            side: 4,
            p,
            gamma: 1.3,
            s0: 0.5,
            s1: 2.0,
            kappa: 0.7,
            rho: 1.2,
            ..Default::default()
        };
        assemble_generator(&params, Flavor::Symmetrized).unwrap()
    }

    #[test]
    fn forms_reproduce_operator_quadratic_form() {
        let pb = problem(0.3);
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..20 {
            let f: Vec<f64> = (0..pb.dim()).map(|_| rng.random::<f64>() - 0.3).collect();
            let q = quadratic_forms(&f, &pb).unwrap();
            let g = pb.to_weighted(&f);
            let direct = pb.rayleigh_weighted(&g);
            assert!(
                (q.rayleigh() - direct).abs() < 1e-12,
                "{} vs {direct}",
                q.rayleigh()
            );
        }
    }

    #[test]
    fn constants_kill_gradients() {
        let pb = problem(0.4);
        let f: Vec<f64> = (0..pb.dim())
            .map(|s| if s % 2 == 1 { 0.8 } else { 0.3 })
            .collect();
        let q = quadratic_forms(&f, &pb).unwrap();
        assert_eq!(q.a2, 0.0);
        assert_eq!(q.a3, 0.0);
        let expect = 1.0f64.sqrt() * (0.8f64 - 0.3).powi(2) * pb.space.n_sites() as f64;
        assert!((q.a4 - expect).abs() < 1e-12);
    }

    #[test]
    fn exchange_form_is_dirichlet_form() {
        let pb = problem(0.35);
        let mut rng = RngStream::new(2, 0).rng();
        let n = pb.space.n_sites();
        for _ in 0..10 {
            let g: Vec<f64> = (0..pb.space.n_configs())
                .map(|_| rng.random::<f64>())
                .collect();
            let f: Vec<f64> = (0..pb.dim()).map(|s| g[pb.space.decode(s).0]).collect();
            let a2 = quadratic_forms(&f, &pb).unwrap().a2;
            let d = ssep_dirichlet_form(&g, &pb).unwrap();
            assert!((a2 - 2.0 * n as f64 * d).abs() <= 1e-12 * a2.max(1.0));
        }
    }

    #[test]
    fn wrong_length_rejected() {
        let pb = problem(0.5);
        assert!(quadratic_forms(&[1.0], &pb).is_err());
        assert!(quadratic_forms(&vec![f64::NAN; pb.dim()], &pb).is_err());
    }
}
