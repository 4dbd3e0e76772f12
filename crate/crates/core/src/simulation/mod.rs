//! Monte Carlo trial engines and the seeded ensemble runner.
//!
//! A trial runs correction cycles until the first uncorrectable error and
//! reports the number of cycles survived. Two noise models are covered:
//! single-angle dephasing with a discretized angle posterior (per-cycle or
//! fast-forward), and general oriented Pauli channels with a randomized
//! channel grid.

mod dephasing;
mod ensemble;
pub mod sampling;
mod unital;

use serde::{Deserialize, Serialize};

use crate::codes::WeightTriple;

pub use dephasing::{run_dephasing, run_dephasing_trial, run_dephasing_trial_fast, DephasingTrialConfig, Theta0};
pub use ensemble::{run_ensemble, run_ensemble_chunked, trial_seed, EnsembleConfig, TrialRecord};
pub use sampling::sample_syndrome;
pub use unital::{run_unital_trial, Orientation, UnitalTrialConfig};

/// Default cycle cap. Trials reaching it are flagged as censored.
pub const DEFAULT_MAX_CYCLES: u64 = 1 << 62;

/// Upper bound accepted for `max_cycles`.
pub const MAX_CYCLES_LIMIT: u64 = 1 << 63;

/// How the estimate steering the code is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Follow the posterior MLE.
    #[default]
    Adaptive,
    /// Keep the initial alignment; no estimation.
    Fixed,
    /// Align to the true channel at every cycle.
    Oracle,
}

/// Dephasing engine choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[default]
    PerCycle,
    FastForward,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    /// Cycles up to and including the failing one, or `max_cycles` when
    /// censored.
    pub lifetime_cycles: u64,
    pub censored: bool,
    pub failure_triple: Option<WeightTriple>,
    pub n_posterior_updates: u64,
    /// Angle distance `|θ̂ − θ₀|` mod π for dephasing, Frobenius distance
    /// between MLE and true error matrix for unital trials. `None` when no
    /// estimator runs.
    pub estimator_error: Option<f64>,
    /// The channel grid was exhausted once and resampled.
    pub grid_restarted: bool,
    pub seed: u64,
}

impl TrialResult {
    fn censored(max_cycles: u64, seed: u64) -> Self {
        Self {
            lifetime_cycles: max_cycles,
            censored: true,
            failure_triple: None,
            n_posterior_updates: 0,
            estimator_error: None,
            grid_restarted: false,
            seed,
        }
    }
}
