use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::switching::{legendre_growth_rate, printed_closed_form, two_state_eigen};

/// Annealed growth rate for d = 1, 2 with catalysts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthD12 {
    /// `sup_a { a gamma - I(a) }`.
    pub legendre: f64,
    /// Perron root of the 2x2 switching generator plus `gamma` on the active state.
    pub perron: f64,
    /// Printed closed form, kept for comparison only.
    pub printed: f64,
    pub printed_minus_legendre: f64,
}

pub fn growth_rate_d12(params: &ModelParams) -> Result<GrowthD12> {
    if !(params.gamma > 0.0) {
        return Err(Error::arg("growth rate needs gamma > 0"));
    }
    let rates = params.rates();
    let legendre = legendre_growth_rate(params.gamma, rates);
    let printed = printed_closed_form(params.gamma, rates);
    Ok(GrowthD12 {
        legendre,
        perron: two_state_eigen(params.gamma, rates),
        printed,
        printed_minus_legendre: printed - legendre,
    })
}

/// Growth-rate bounds for d >= 3 with catalysts, evaluated as plain arithmetic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthChainD3 {
    pub gamma: f64,
    /// Piecewise lower value: `gamma p` if `s1 <= s0`, else `max(gamma p - s1 + s0, 0)`.
    pub stated_lower: f64,
    /// Lower bound from a profile sitting fully in the active state:
    /// `sqrt(s0 s1) + gamma p - s1`.
    pub active_profile_lower: f64,
}

impl GrowthChainD3 {
    /// `stated_lower < gamma`, and for `s1 <= s0` also `gamma p <= active_profile_lower`.
    pub fn consistent(&self, p: f64, s0: f64, s1: f64) -> bool {
        let below = self.stated_lower < self.gamma;
        if s1 <= s0 {
            below && self.gamma * p <= self.active_profile_lower + 1e-12
        } else {
            below
        }
    }
}

pub fn growth_chain_d3(params: &ModelParams) -> Result<GrowthChainD3> {
    if !(params.gamma > 0.0) {
        return Err(Error::arg("growth bounds need gamma > 0"));
    }
    let ModelParams {
        p, gamma, s0, s1, ..
    } = *params;
    let gp = gamma * p;
    let stated_lower = if s1 <= s0 {
        gp
    } else {
        (gp - s1 + s0).max(0.0)
    };
    Ok(GrowthChainD3 {
        gamma,
        stated_lower,
        active_profile_lower: (s0 * s1).sqrt() + gp - s1,
    })
}
