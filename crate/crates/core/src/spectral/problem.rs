use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::torus::TorusSpec;

use super::space::{occupied, swap_bits, SparseMatrix, StateSpace, DEFAULT_CAP};

/// Which switching generator the problem carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Rates `(s0, s1)`, potential `gamma 1{i = 1, c(z) = 1}`.
    Original,
    /// Both rates `sqrt(s0 s1)`, potential `V = -s_i + gamma 1{i = 1, c(z) = 1}`.
    Symmetrized,
}

/// Finite-volume generator of (environment, walker, switch) plus potential.
///
/// `matrix` acts on `sqrt(nu)`-weighted coordinates, so the symmetrized flavor
/// is symmetric in the plain sense.
#[derive(Clone, Debug)]
pub struct SpectralProblem {
    pub params: ModelParams,
    pub space: StateSpace,
    pub flavor: Flavor,
    /// Pure generator (no potential) in function coordinates.
    pub generator: SparseMatrix,
    pub potential: Vec<f64>,
    /// `nu(c)` per state.
    pub weights: Vec<f64>,
    /// `D^{1/2} (generator + potential) D^{-1/2}` with `D = diag(weights)`.
    pub matrix: SparseMatrix,
}

/// Assembles the problem on the torus described by `params`.
pub fn assemble_generator(params: &ModelParams, flavor: Flavor) -> Result<SpectralProblem> {
    params.validate()?;
    assemble_on(params.torus(), params, flavor, DEFAULT_CAP)
}

/// Assembles on an explicit torus; `params.d` and `params.side` are ignored.
pub fn assemble_on(
    torus: TorusSpec,
    params: &ModelParams,
    flavor: Flavor,
    cap: usize,
) -> Result<SpectralProblem> {
    if !(params.p > 0.0 && params.p < 1.0) {
        return Err(Error::Validation(format!(
            "p must lie in (0, 1), got {}",
            params.p
        )));
    }
    for (name, v) in [
        ("rho", params.rho),
        ("kappa", params.kappa),
        ("s0", params.s0),
        ("s1", params.s1),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Validation(format!(
                "{name} must be finite and non-negative, got {v}"
            )));
        }
    }
    if !params.gamma.is_finite() {
        return Err(Error::Validation("gamma must be finite".into()));
    }
    let space = StateSpace::new(torus, cap)?;
    let degree = torus.degree();
    let edges: Vec<(usize, usize)> = (0..torus.n_edges()).map(|e| torus.edge(e)).collect();
    let (r0, r1) = match flavor {
        Flavor::Original => (params.s0, params.s1),
        Flavor::Symmetrized => {
            let s = (params.s0 * params.s1).sqrt();
            (s, s)
        }
    };
    let mut rows = Vec::with_capacity(space.dim());
    let mut potential = Vec::with_capacity(space.dim());
    let mut weights = Vec::with_capacity(space.dim());
    for s in 0..space.dim() {
        let (c, z, i) = space.decode(s);
        let mut row = Vec::with_capacity(edges.len() + degree + 2);
        let mut diag = 0.0;
        for &(a, b) in &edges {
            let c2 = swap_bits(c, a, b);
            if c2 != c {
                row.push((space.index(c2, z, i), params.rho));
                diag -= params.rho;
            }
        }
        if i == 1 {
            for k in 0..degree {
                let y = torus.step(z, k);
                if y != z {
                    row.push((space.index(c, y, 1), params.kappa));
                    diag -= params.kappa;
                }
            }
        }
        let flip = if i == 1 { r1 } else { r0 };
        row.push((space.index(c, z, 1 - i), flip));
        diag -= flip;
        row.push((s, diag));
        rows.push(row);
        let catalyst = if i == 1 && occupied(c, z) {
            params.gamma
        } else {
            0.0
        };
        potential.push(match flavor {
            Flavor::Original => catalyst,
            Flavor::Symmetrized => catalyst - if i == 1 { params.s1 } else { params.s0 },
        });
        weights.push(space.nu(c, params.p));
    }
    let generator = SparseMatrix::from_rows(rows);
    let scale: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let matrix = generator.plus_diagonal(&potential).similarity(&scale);
    Ok(SpectralProblem {
        params: params.clone(),
        space,
        flavor,
        generator,
        potential,
        weights,
        matrix,
    })
}

impl SpectralProblem {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `sqrt(s0 s1)`, the shift between the two flavors.
    pub fn shift(&self) -> f64 {
        (self.params.s0 * self.params.s1).sqrt()
    }

    /// Converts a function `f` to the coordinates `matrix` acts on.
    pub fn to_weighted(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w.sqrt())
            .collect()
    }

    /// Inverse of [`SpectralProblem::to_weighted`].
    pub fn from_weighted(&self, g: &[f64]) -> Vec<f64> {
        g.iter()
            .zip(&self.weights)
            .map(|(v, w)| v / w.sqrt())
            .collect()
    }

    /// `<g, M g> / <g, g>` in weighted coordinates.
    pub fn rayleigh_weighted(&self, g: &[f64]) -> f64 {
        let mut mg = vec![0.0; g.len()];
        self.matrix.matvec(g, &mut mg);
        let num: f64 = g.iter().zip(&mg).map(|(a, b)| a * b).sum();
        num / g.iter().map(|v| v * v).sum::<f64>()
    }
}
