//! Simple symmetric exclusion environment and its comparison field of
//! independent walkers.

mod indep;
mod lattice;
mod stats;
mod trace;

pub use indep::{simulate_indep_field, IndepFieldTrace, WalkerTrack};
pub use lattice::{sample_initial, LatticeConfig};
pub use stats::{evolve_ssep, stationarity_stats, vacancy_probability_mc, StationarityStats};
pub use trace::{simulate_ssep, EnvTrace, TraceCursor};
