//! Parabolic Anderson model driven by a symmetric exclusion process, with a
//! dormancy switch on the walker.
//!
//! The crate covers the environment simulation, Monte Carlo Feynman–Kac
//! estimates, quenched PDE solves, finite-volume spectral bounds and the
//! large-time asymptotic envelopes.

pub mod acceptance;
pub mod asymptotics;
pub mod error;
pub mod estimate;
pub mod fk;
pub mod model;
pub mod numeric;
pub mod pam;
pub mod replicas;
pub mod rng;
pub mod spectral;
pub mod ssep;
pub mod switching;
pub mod torus;

pub use error::{Error, Result};
pub use estimate::Estimate;
pub use model::{ModelParams, RatePair};
pub use torus::TorusSpec;
