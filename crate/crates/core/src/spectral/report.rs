use serde::Serialize;

use super::eigen::{
    dense_general_top, dense_symmetric_top, lanczos_top, power_top, EigenResult, DENSE_MAX_DIM,
};
use super::problem::{assemble_generator, Flavor};
use crate::error::Result;
use crate::model::ModelParams;

/// Eigenvalue report for one parameter set, both flavors.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub params: ModelParams,
    pub dimension: usize,
    pub nnz: usize,
    /// `sqrt(s0 s1)`.
    pub shift: f64,
    pub lambda_nonsym: EigenResult,
    pub lambda_sym: EigenResult,
    /// `lambda_nonsym - lambda_sym - sqrt(s0 s1)`.
    pub shift_defect: f64,
    pub dense_nonsym: Option<f64>,
    pub dense_sym: Option<f64>,
    pub fingerprint_nonsym: String,
    pub fingerprint_sym: String,
}

/// Assembles both flavors and computes their top eigenvalues.
pub fn spectral_report(params: &ModelParams, tol: f64) -> Result<SpectralReport> {
    let orig = assemble_generator(params, Flavor::Original)?;
    let sym = assemble_generator(params, Flavor::Symmetrized)?;
    let lambda_nonsym = power_top(&orig.matrix, tol, 2_000_000)?;
    let lambda_sym = lanczos_top(&sym.matrix, tol, 2000)?;
    let small = orig.dim() <= DENSE_MAX_DIM.min(1024);
    let shift = orig.shift();
    Ok(SpectralReport {
        params: params.clone(),
        dimension: orig.dim(),
        nnz: orig.matrix.nnz(),
        shift,
        shift_defect: lambda_nonsym.value - lambda_sym.value - shift,
        lambda_nonsym,
        lambda_sym,
        dense_nonsym: if small {
            Some(dense_general_top(&orig.matrix)?)
        } else {
            None
        },
        dense_sym: if small {
            Some(dense_symmetric_top(&sym.matrix)?)
        } else {
            None
        },
        fingerprint_nonsym: orig.matrix.fingerprint(),
        fingerprint_sym: sym.matrix.fingerprint(),
    })
}
