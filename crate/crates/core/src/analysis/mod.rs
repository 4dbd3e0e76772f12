//! Lifetime statistics, power-law fits and closed-form evaluators.

mod bounds;
mod fit;
mod grid_spacing;
mod stats;

pub use bounds::{
    c_opt_numeric, expected_code_performance, haar_average_coefficient, haar_kx,
    haar_leading_order_lifetime, haar_lifetime_bound_closed, optimal_lifetime_coefficient,
    unital_baseline_lifetime, z_failure_multiplicity, McEstimate, MIN_COPT_SAMPLES,
};
pub use fit::{power_law_fit, FitResult};
pub use grid_spacing::{
    grid_spacing_study, lemma2_bound, lemma2_point_probability, sample_min_distance, GridSpacingRow,
};
pub use stats::{
    kolmogorov_q, ks_one_sample, ks_two_sample, lifetime_stats, mean_and_se, summarize,
    LifetimeSummary, MODE_BINS_PER_DECADE,
};
