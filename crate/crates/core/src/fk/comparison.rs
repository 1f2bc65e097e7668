use serde::Serialize;

use super::path::SwitchWalkPath;
use crate::error::{Error, Result};
use crate::estimate::{pooled_stderr, Estimate, EstimateSummary};
use crate::model::ModelParams;
use crate::replicas::replicate_many;
use crate::ssep::{sample_initial, simulate_indep_field, simulate_ssep};

/// Environment-only expectations along one fixed `(X, alpha)` path.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub ssep: EstimateSummary,
    pub indep: EstimateSummary,
    /// `(ssep - indep) / pooled stderr`; the exclusion bound predicts `z <= 0`
    /// up to noise.
    pub z: f64,
}

impl ComparisonReport {
    /// One-sided check `ssep <= indep + k * pooled stderr`.
    pub fn holds(&self, k: f64) -> bool {
        self.z <= k || self.ssep.mean <= self.indep.mean
    }
}

/// Compares `E[exp(gamma * exposure)]` under the exclusion process and under
/// independent walkers (rate `rho` per neighbour), both from the Bernoulli measure.
pub fn comparison_harness(
    params: &ModelParams,
    path: &SwitchWalkPath,
    n: u64,
    seed: u64,
) -> Result<ComparisonReport> {
    params.validate()?;
    if params.gamma >= 0.0 {
        return Err(Error::arg("comparison requires gamma < 0"));
    }
    if path.horizon() != params.t {
        return Err(Error::arg("path horizon must equal t"));
    }
    let torus = params.torus();
    let gamma = params.gamma;
    let est = replicate_many(seed, n, 2, |rng, out| {
        let init = sample_initial(&torus, params.p, rng);
        let tr = simulate_ssep(init, &torus, params.rho, params.t, rng)?;
        out[0] = (gamma * path.exposure_on_trace(&tr)?).exp();
        let field = simulate_indep_field(&torus, params.p, params.rho, params.t, rng)?;
        out[1] = (gamma * path.exposure_on_indep(&field)?).exp();
        Ok(())
    })?;
    Ok(report(&est[0], &est[1]))
}

fn report(ssep: &Estimate, indep: &Estimate) -> ComparisonReport {
    let se = pooled_stderr(ssep, indep);
    let diff = ssep.mean() - indep.mean();
    let z = if se > 0.0 {
        diff / se
    } else if diff > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    ComparisonReport {
        ssep: ssep.summary(),
        indep: indep.summary(),
        z,
    }
}
