//! Stochastic oracles: Brownian area Monte Carlo, the lattice self-repelling
//! walk, and goodness-of-fit statistics.

pub mod brownian;
pub mod stats;
pub mod tsaw;

pub use brownian::{
    mc_estimate, mean_and_se, sample_ensemble, sample_path_functional, target_weights, McConfig, McEstimate, McTarget,
    PathConfig, PathFunctionalSample,
};
pub use stats::{calibrate_and_test, ks_p_value, ks_statistic, CdfTable, GofReport, Histogram, MomentCheck};
pub use tsaw::{tsaw_ensemble, tsaw_run, tsaw_step, EnsembleConfig, SamplingMode, StepTable, WalkRecord, WalkState};
