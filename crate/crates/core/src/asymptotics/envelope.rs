use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Time scale on which `log <U(t)>` is linear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Sqrt,
    TOverLog,
    Linear,
}

impl Scale {
    pub fn for_dim(d: usize) -> Result<Scale> {
        match d {
            1 => Ok(Scale::Sqrt),
            2 => Ok(Scale::TOverLog),
            3 => Ok(Scale::Linear),
            _ => Err(Error::arg(format!("no scale for d = {d}"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Scale::Sqrt => t.sqrt(),
            Scale::TOverLog => t / t.ln(),
            Scale::Linear => t,
        }
    }
}

/// Interval `[lo, hi]` for the prefactor `K` in `-log <U(t)> ~ K a_t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeSpec {
    pub d: usize,
    pub scale: Scale,
    pub lo: f64,
    pub hi: f64,
    /// Where each endpoint comes from.
    pub lo_source: &'static str,
    pub hi_source: &'static str,
}

impl EnvelopeSpec {
    pub fn contains(&self, k: f64) -> bool {
        self.lo <= k && k <= self.hi
    }
}

fn check_d12(d: usize) -> Result<()> {
    if d == 3 {
        return Err(Error::arg("d = 3 has a linear rate; use rate_bound_d3"));
    }
    if !(1..=2).contains(&d) {
        return Err(Error::arg(format!(
            "envelopes exist for d = 1, 2 only, got {d}"
        )));
    }
    Ok(())
}

/// Survival envelope without dormancy.
///
/// d = 1: `[4 p sqrt(rho/pi), 4 |log(1-p)| sqrt(rho/pi)]` on `sqrt(t)`;
/// d = 2: `[4 p rho pi, 4 |log(1-p)| rho pi]` on `t / log t`.
pub fn envelope_no_dormancy(d: usize, params: &ModelParams) -> Result<EnvelopeSpec> {
    check_d12(d)?;
    let (p, rho) = (params.p, params.rho);
    let base = if d == 1 {
        4.0 * (rho / std::f64::consts::PI).sqrt()
    } else {
        4.0 * rho * std::f64::consts::PI
    };
    Ok(EnvelopeSpec {
        d,
        scale: Scale::for_dim(d)?,
        lo: p * base,
        hi: (1.0 - p).ln().abs() * base,
        lo_source: "comparison with independent walkers",
        hi_source: "Jensen bound over the walker range",
    })
}

/// Envelope with dormancy: the no-dormancy interval times `sqrt(s0/(s0+s1))`
/// (d = 1) or `s0/(s0+s1)` (d = 2).
pub fn envelope_dormancy(d: usize, params: &ModelParams) -> Result<EnvelopeSpec> {
    if !(params.s0 > 0.0 && params.s1 > 0.0) {
        return Err(Error::arg("dormancy envelope needs s0 > 0 and s1 > 0"));
    }
    let base = envelope_no_dormancy(d, params)?;
    let f = dormancy_factor(d, params.s0, params.s1);
    Ok(EnvelopeSpec {
        lo: base.lo * f,
        hi: base.hi * f,
        ..base
    })
}

/// Factor converting the no-dormancy envelope to the dormant one.
pub fn dormancy_factor(d: usize, s0: f64, s1: f64) -> f64 {
    let active = s0 / (s0 + s1);
    if d == 1 {
        active.sqrt()
    } else {
        active
    }
}
