//! Monte Carlo ground truth: sampled deployments, per-slot user dynamics,
//! and the reproducible experiment harness with empirical estimates of
//! every analytic quantity.

pub mod deployment;
pub mod engine;
pub mod experiment;
pub mod stats;

pub use deployment::{sample_deployment, Deployment, Metric};
pub use engine::{
    associate, associate_all, battery_step, compute_sir, download_probability,
    estimate_rate_coverage, mobility_step, redraw_positions, User, UserRoster,
};
pub use experiment::{
    mean_se, run_experiment, Estimate, ExperimentOptions, MonteCarloReport, RealizationSummary,
    SimError,
};
