use std::path::{Path, PathBuf};

use pamd_core::asymptotics::Scale;
use pamd_core::{Error, ModelParams, Result};
use serde::{Deserialize, Serialize};

/// Which annealed estimator `estimate-u` uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Mean of `exp(gamma * exposure)` over joint samples.
    #[default]
    Plain,
    /// Initial configuration integrated out along the stirring flow.
    Stirring,
}

/// One experiment: flat model keys plus run controls. Unknown keys are errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub d: usize,
    #[serde(rename = "L")]
    pub side: usize,
    pub p: f64,
    pub rho: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub s0: f64,
    pub s1: f64,
    pub t: f64,
    pub replicas: u64,
    pub t_grid: Option<Vec<f64>>,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub estimator: Estimator,
    /// Series CSV read by `fit`.
    pub input: Option<PathBuf>,
    pub scale: Option<Scale>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let m = ModelParams::default();
        ExperimentConfig {
            command: None,
            d: m.d,
            side: m.side,
            p: m.p,
            rho: m.rho,
            gamma: m.gamma,
            kappa: m.kappa,
            s0: m.s0,
            s1: m.s1,
            t: m.t,
            replicas: 10_000,
            t_grid: None,
            tol: 1e-8,
            seed: 0,
            out: None,
            estimator: Estimator::Plain,
            input: None,
            scale: None,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            d: self.d,
            side: self.side,
            p: self.p,
            rho: self.rho,
            gamma: self.gamma,
            kappa: self.kappa,
            s0: self.s0,
            s1: self.s1,
            t: self.t,
        }
    }

    /// Time points to report: `t_grid` if given, else `[t]`.
    pub fn grid(&self) -> Vec<f64> {
        self.t_grid.clone().unwrap_or_else(|| vec![self.t])
    }

    /// Checks the model constants and run controls before any compute.
    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if self.replicas == 0 {
            return Err(Error::Validation("replicas must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Validation(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if let Some(g) = &self.t_grid {
            if g.is_empty() || g.windows(2).any(|w| !(w[1] > w[0])) || !(g[0] > 0.0) {
                return Err(Error::Validation(
                    "t_grid must be positive and strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
