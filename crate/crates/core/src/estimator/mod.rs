//! Malthus-parameter estimators on simulated trees and their Monte Carlo
//! aggregation.

mod mc;
mod stats;

pub use mc::{
    config_digest, contracted_config, cv_table, estimator_sd_comparison, malthus_hat_biomass, malthus_hat_count,
    monte_carlo, CvRow, EstimatorKind, Executor, MalthusEstimate, Protocol, SdRow, Sequential,
};
pub use stats::{quantile_sorted, summarize, PopulationStats, Summary};
