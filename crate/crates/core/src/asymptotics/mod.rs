//! Closed-form envelopes and constants for long-time behaviour, the 3D
//! lattice Green's function, walk ranges and scale fitting.
//!
//! Survival envelopes give an interval for `K` in
//! `-log <U(t)> = K a_t (1 + o(1))` with `a_t = sqrt(t)` (d = 1) or
//! `t / log t` (d = 2). They are asymptotic statements; finite-`t` checks
//! against them are one-sided and loose.

mod envelope;
mod fit;
mod green;
mod growth;
mod range;

pub use envelope::{dormancy_factor, envelope_dormancy, envelope_no_dormancy, EnvelopeSpec, Scale};
pub use fit::{fit_scale, ScaleFit, SeriesPoint};
pub use green::{
    green_function_d3, green_function_d3_mc, rate_bound_d3, scaled_bessel_i0, GreenMethod,
    GreenValue, RateBoundD3,
};
pub use growth::{growth_chain_d3, growth_rate_d12, GrowthChainD3, GrowthD12};
pub use range::{expected_range_asymptotic, expected_range_mc, jensen_vacancy_bound, range_sample};
