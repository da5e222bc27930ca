//! Benchmark catalog and measurement tools.

pub mod cases;
pub mod convergence;
pub mod entropy;
pub mod norms;
pub mod perturbation;
pub mod relax;

pub use cases::{lookup, Case, Case1D, Case2D, Perturbation, CASE_NAMES};
pub use convergence::{convergence_study, fit_slope, ConvergenceReport, Target};
pub use entropy::{
    entropy_drift, entropy_timeseries, mass_balance, max_alpha, n_tot_drift, MassBalance,
};
pub use norms::{error_norms, error_norms_2d, NodeSet};
pub use perturbation::{
    initialization_comparison, perturbation_experiment, Initialization, PerturbationRun,
    PerturbationSetup, SchemePreset,
};
pub use relax::relax_to_steady;
