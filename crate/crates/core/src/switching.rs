//! The active/dormant switching chain: paths, local times, the large
//! deviation rate function of the active local time and its Legendre dual.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::RatePair;
use crate::numeric::golden_section_max;
use crate::rng::exp_time;

/// A path of the switching chain on `[0, horizon]`, started active.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchPath {
    horizon: f64,
    flips: Vec<f64>,
}

impl SwitchPath {
    /// Builds a path from sorted flip times in `[0, horizon]`.
    pub fn new(horizon: f64, flips: Vec<f64>) -> Result<Self> {
        if !flips.windows(2).all(|w| w[0] < w[1])
            || flips.iter().any(|&t| !(0.0..=horizon).contains(&t))
        {
            return Err(Error::arg(
                "flip times must be strictly increasing inside [0, horizon]",
            ));
        }
        Ok(SwitchPath { horizon, flips })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn flips(&self) -> &[f64] {
        &self.flips
    }

    /// `alpha(s)`: true when active. Right-continuous at flips.
    pub fn active_at(&self, s: f64) -> bool {
        self.flips.partition_point(|&f| f <= s) % 2 == 0
    }

    /// Local times `(L_t(0), L_t(1))` up to `t <= horizon`.
    pub fn local_times(&self, t: f64) -> (f64, f64) {
        let mut active = 0.0;
        let mut last = 0.0;
        let mut state = true;
        for &f in self.flips.iter().take_while(|&&f| f <= t) {
            if state {
                active += f - last;
            }
            last = f;
            state = !state;
        }
        if state {
            active += t - last;
        }
        (t - active, active)
    }
}

/// Simulates the chain from the active state; holding time in state `i` is Exp(`s_i`).
pub fn simulate_alpha<R: Rng + ?Sized>(rates: RatePair, t: f64, rng: &mut R) -> Result<SwitchPath> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::arg(format!(
            "horizon must be finite and non-negative, got {t}"
        )));
    }
    let mut flips = Vec::new();
    let mut active = true;
    let mut now = 0.0;
    loop {
        now += exp_time(rng, rates.out_of(active));
        if now > t {
            break;
        }
        flips.push(now);
        active = !active;
    }
    Ok(SwitchPath { horizon: t, flips })
}

/// Rate function of `L_t(1) / t`: `-2 sqrt(s0 s1 a (1 - a)) + (s1 - s0) a + s0`.
pub fn rate_i(a: f64, rates: RatePair) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::arg(format!("a must lie in [0, 1], got {a}")));
    }
    Ok(rate_unchecked(a, rates))
}

#[inline]
fn rate_unchecked(a: f64, RatePair { s0, s1 }: RatePair) -> f64 {
    -2.0 * (s0 * s1 * a * (1.0 - a)).max(0.0).sqrt() + (s1 - s0) * a + s0
}

/// `sup_{a in [0,1]} { a g - I(a) }` by golden-section search (absolute tolerance 1e-12 in `a`).
pub fn legendre_growth_rate(g: f64, rates: RatePair) -> f64 {
    legendre_argmax(g, rates).1
}

/// Maximiser and value of the Legendre transform.
pub fn legendre_argmax(g: f64, rates: RatePair) -> (f64, f64) {
    golden_section_max(|a| a * g - rate_unchecked(a, rates), 0.0, 1.0, 1e-12)
}

/// Perron root of the tilted generator `[[-s0, s0], [s1, g - s1]]` in closed form.
pub fn two_state_eigen(g: f64, RatePair { s0, s1 }: RatePair) -> f64 {
    let disc = g * g + 2.0 * g * (s0 - s1) + (s0 + s1) * (s0 + s1);
    0.5 * ((g - s0 - s1) + disc.max(0.0).sqrt())
}

/// The growth-rate expression printed for the recurrent case, evaluated as written.
/// Kept for comparison with [`legendre_growth_rate`]; the two disagree in general.
pub fn printed_closed_form(gamma: f64, RatePair { s0, s1 }: RatePair) -> f64 {
    let root = (gamma * gamma + 2.0 * gamma * (s0 - s1) + (s0 + s1) * (s0 + s1)).sqrt();
    gamma - s1 - ((gamma + s0 - s1).powi(2) - s0 * s1) / root
}

/// `E_1[exp(g L_t(1))]` exactly: the active row sum of `exp(t [[-s0, s0], [s1, g - s1]])`.
pub fn two_state_mgf(g: f64, rates: RatePair, t: f64) -> f64 {
    let RatePair { s0, s1 } = rates;
    // rows/cols ordered (dormant, active); we need row "active"
    let (a, b, c, d) = (-s0, s0, s1, g - s1);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let (lp, lm) = (0.5 * (tr + disc), 0.5 * (tr - disc));
    // Sylvester: exp(tM) = [e^{lp t}(M - lm) - e^{lm t}(M - lp)] / (lp - lm)
    let row_active_sum = |l: f64| (c + d) - l; // row 2 of (M - l I) summed
    if disc > 1e-8 * (1.0 + tr.abs()) {
        ((lp * t).exp() * row_active_sum(lm) - (lm * t).exp() * row_active_sum(lp)) / disc
    } else {
        // repeated root: exp(tM) = e^{l t} (I + t (M - l I))
        let l = 0.5 * tr;
        (l * t).exp() * (1.0 + t * row_active_sum(l))
    }
}

/// Radon–Nikodym weight converting symmetric-rate paths to rates `(s0, s1)`:
/// `exp(sqrt(s0 s1) t - s0 L_t(0) - s1 L_t(1))`.
pub fn com_weight(path: &SwitchPath, RatePair { s0, s1 }: RatePair) -> f64 {
    let t = path.horizon();
    let (l0, l1) = path.local_times(t);
    ((s0 * s1).sqrt() * t - s0 * l0 - s1 * l1).exp()
}

/// Exact Radon–Nikodym derivative against the chain with both rates `sqrt(s0 s1)`:
/// [`com_weight`] times the jump-count factor `sqrt(s1 / s0)` when the path ends dormant.
pub fn com_weight_exact(path: &SwitchPath, rates: RatePair) -> f64 {
    let w = com_weight(path, rates);
    if path.active_at(path.horizon()) {
        w
    } else {
        w * (rates.s1 / rates.s0).sqrt()
    }
}
