//! Model constants shared by every simulator and solver.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::torus::TorusSpec;

/// All constants of the dormancy model on a finite torus.
///
/// Rates are per neighbour (`kappa`, `rho` per edge) or per individual
/// (`s0` wake-up, `s1` fall-asleep). `gamma > 0` makes exclusion particles
/// catalysts, `gamma < 0` makes them traps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
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
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            d: 1,
            side: 3,
            p: 0.5,
            rho: 1.0,
            gamma: 1.0,
            kappa: 1.0,
            s0: 1.0,
            s1: 1.0,
            t: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if !(1..=3).contains(&self.d) {
            return bad(format!("d must be 1, 2 or 3, got {}", self.d));
        }
        if self.side < 3 {
            return bad(format!("L must be at least 3, got {}", self.side));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad(format!("p must lie in (0, 1), got {}", self.p));
        }
        for (name, v) in [
            ("rho", self.rho),
            ("kappa", self.kappa),
            ("s0", self.s0),
            ("s1", self.s1),
            ("t", self.t),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if !self.gamma.is_finite() {
            return bad(format!("gamma must be finite, got {}", self.gamma));
        }
        TorusSpec::new(self.d, self.side).map_err(|e| Error::Validation(e.to_string()))?;
        Ok(())
    }

    /// Validates and returns `self`, for use after struct-update syntax.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn torus(&self) -> TorusSpec {
        TorusSpec::new(self.d, self.side).expect("validated parameters")
    }

    pub fn rates(&self) -> RatePair {
        RatePair {
            s0: self.s0,
            s1: self.s1,
        }
    }

    /// `sqrt(s0 * s1)`, the rate of the symmetrised switching chain.
    pub fn sym_rate(&self) -> f64 {
        (self.s0 * self.s1).sqrt()
    }

    /// First 16 hex digits of the SHA-256 of the exact bit patterns of all fields.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.d as u64).to_le_bytes());
        h.update((self.side as u64).to_le_bytes());
        for v in [
            self.p, self.rho, self.gamma, self.kappa, self.s0, self.s1, self.t,
        ] {
            h.update(v.to_bits().to_le_bytes());
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Switching rates of the active/dormant chain: `s0` wakes, `s1` sleeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub s0: f64,
    pub s1: f64,
}

impl RatePair {
    pub fn new(s0: f64, s1: f64) -> Result<Self> {
        if !(s0.is_finite() && s1.is_finite() && s0 >= 0.0 && s1 >= 0.0) {
            return Err(Error::arg(format!(
                "switching rates must be non-negative, got ({s0}, {s1})"
            )));
        }
        Ok(RatePair { s0, s1 })
    }

    /// Leaving rate of state `i`.
    #[inline]
    pub fn out_of(&self, active: bool) -> f64 {
        if active {
            self.s1
        } else {
            self.s0
        }
    }
}
