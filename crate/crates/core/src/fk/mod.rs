//! Feynman–Kac Monte Carlo for the annealed total mass.
//!
//! The walker, its switch and the exclusion environment are driven forward in
//! time by one merged event loop; the potential is constant between events,
//! so the exposure integral is an exact finite sum.

mod branching;
mod comparison;
mod fused;
mod path;
mod stirring;

pub use branching::{
    estimate_branching_mean, simulate_branching, BranchingOutcome, EXPLOSION_LIMIT,
};
pub use comparison::{comparison_harness, ComparisonReport};
pub use fused::{
    annealed_blocks, estimate_annealed_u, estimate_annealed_u_grid, estimate_on_traces,
    estimate_quenched_u, sample_exposures, sample_fk, sample_fk_from, JointSample,
};
pub use path::{sample_switch_walk, simulate_switch_walk, Segment, SwitchWalkPath, WalkPath};
pub use stirring::{estimate_annealed_u_stirring, log_site_factor, stirring_log_weights};
