//! Exact finite-volume spectral computations on `{0,1}^N x sites x {0,1}`.
//!
//! Two flavors of the same operator are assembled: the original one with
//! switching rates `(s0, s1)`, and a symmetrized one whose top eigenvalue is
//! smaller by exactly `sqrt(s0 s1)`.

mod annealed;
mod bounds;
mod eigen;
mod forms;
mod problem;
mod report;
mod space;

pub use annealed::{dense_annealed_u, dense_operator, spectral_annealed_u};
pub use bounds::{
    best_constant_profile_bound, constant_profile, constant_profile_bound, f_epsilon,
    f_epsilon_bound, f_epsilon_limit, FEpsilon,
};
pub use eigen::{
    dense_general_top, dense_symmetric_spectrum, dense_symmetric_top, lanczos_top, power_top,
    EigenResult, DENSE_MAX_DIM,
};
pub use forms::{quadratic_forms, ssep_dirichlet_form, QuadForms};
pub use problem::{assemble_generator, assemble_on, Flavor, SpectralProblem};
pub use report::{spectral_report, SpectralReport};
pub use space::{SparseMatrix, StateSpace, DEFAULT_CAP};
