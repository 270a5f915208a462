//! Monte Carlo experiments.
//!
//! Every estimator runs independent trials; trial `t` of a run seeded with
//! `seed` draws from its own counter-based stream (see [`trial_rng`]), so
//! results do not depend on how trials are scheduled across threads.
//! Aggregation uses integer sums only, which keeps parallel output
//! bit-identical to a sequential run.

mod critical;
mod estimators;
mod rng;
mod scaling;
mod stats;

pub use critical::{critical_length, LcResult, LcSearch, Probe};
pub use estimators::{
    center_cluster_stats, center_site, diam_tail_probability, percolation_probability,
    percolation_successes, seeded_growth, ClusterStats,
};
pub use rng::{sample_bernoulli, trial_rng, STREAM_RULE};
pub use scaling::{
    compare_models, exp_iter, lambda, log_iter, scaling_fit, FitModel, FitReport, ModelComparison,
    ScalingPoint,
};
pub use stats::{wilson_interval, TrialEstimate, WILSON_Z};
