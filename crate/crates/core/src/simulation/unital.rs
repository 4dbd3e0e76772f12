//! Trials under a fixed oriented Pauli channel with a randomized channel
//! grid steering the code's counter-rotation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{geometric, prob_any, sample_error_cycle};
use super::{Strategy, TrialResult, DEFAULT_MAX_CYCLES, MAX_CYCLES_LIMIT};
use crate::channel::{optimal_control, rates_from_error_matrix, Eccentricities, OrientedPauliChannel};
use crate::codes::AsymmetricCode;
use crate::error::{Error, Result};
use crate::geom3::{haar_rotation, sym_frobenius_distance, Rotation3};
use crate::grid_estimator::{sample_grid, Candidate, ChannelGrid};
use crate::seed::trial_rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    #[default]
    HaarRandom,
    Fixed(Rotation3),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitalTrialConfig {
    pub code: AsymmetricCode,
    pub p: f64,
    pub ecc: Eccentricities,
    pub orientation: Orientation,
    pub n_points: usize,
    /// Put the true channel into the grid at a random slot.
    pub plant_truth: bool,
    pub strategy: Strategy,
    pub max_cycles: u64,
    pub seed: u64,
}

impl UnitalTrialConfig {
    pub fn new(code: AsymmetricCode, p: f64, ecc: Eccentricities, n_points: usize) -> Self {
        Self {
            code,
            p,
            ecc,
            orientation: Orientation::HaarRandom,
            n_points,
            plant_truth: false,
            strategy: Strategy::Adaptive,
            max_cycles: DEFAULT_MAX_CYCLES,
            seed: 0,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.p) {
            return Err(Error::invalid(format!("p must lie in [0, 1/2], got {}", self.p)));
        }
        Eccentricities::new(self.ecc.k1, self.ecc.k2, self.ecc.k3)?;
        if self.n_points == 0 {
            return Err(Error::invalid("n_points must be at least 1"));
        }
        if self.max_cycles == 0 || self.max_cycles > MAX_CYCLES_LIMIT {
            return Err(Error::invalid(format!(
                "max_cycles must lie in [1, 2^63], got {}",
                self.max_cycles
            )));
        }
        Ok(())
    }
}

fn build_grid<R: Rng + ?Sized>(cfg: &UnitalTrialConfig, truth: &OrientedPauliChannel, rng: &mut R) -> Result<ChannelGrid> {
    let grid = sample_grid(cfg.n_points, rng)?;
    if !cfg.plant_truth {
        return Ok(grid);
    }
    let mut candidates = grid.candidates().to_vec();
    let slot = rng.random_range(0..candidates.len());
    candidates[slot] = Candidate::new(truth.ecc(), *truth.orientation());
    ChannelGrid::from_candidates(candidates)
}

/// Runs correction cycles until failure. Error-free cycles are skipped in
/// one geometric draw: they leave the posterior untouched and the total
/// error probability per cycle is `p` whatever the control.
pub fn run_unital_trial(cfg: &UnitalTrialConfig) -> Result<TrialResult> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed);
    let orientation = match cfg.orientation {
        Orientation::HaarRandom => haar_rotation(&mut rng),
        Orientation::Fixed(r) => r,
    };
    let ch = OrientedPauliChannel::new(cfg.p, cfg.ecc, orientation)?;
    let a = ch.error_matrix();
    let n = cfg.code.n();

    let mut grid = match cfg.strategy {
        Strategy::Adaptive => Some(build_grid(cfg, &ch, &mut rng)?),
        _ => None,
    };
    let mut control = match (&grid, cfg.strategy) {
        (Some(g), _) => g.mle_control()?.1,
        (None, Strategy::Oracle) => optimal_control(&a)?,
        (None, _) => Rotation3::identity(),
    };
    let mut mle = grid.as_ref().map(|g| g.mle_index());
    let mut updates = 0u64;
    let mut restarted = false;

    let q_any = prob_any(cfg.p, n as u64);
    let mut t = 0u64;
    loop {
        let estimator_error = grid
            .as_ref()
            .map(|g| sym_frobenius_distance(g.mle_matrix(), &a));
        let censored = || TrialResult {
            n_posterior_updates: updates,
            estimator_error,
            grid_restarted: restarted,
            ..TrialResult::censored(cfg.max_cycles, cfg.seed)
        };
        let Some(skip) = geometric(q_any, &mut rng) else {
            return Ok(censored());
        };
        match t.checked_add(skip) {
            Some(next) if next <= cfg.max_cycles => t = next,
            _ => return Ok(censored()),
        }
        let rates = rates_from_error_matrix(cfg.p, &a, &control);
        let triple = sample_error_cycle(&rates, n, &mut rng);
        if !cfg.code.correctable(triple) {
            return Ok(TrialResult {
                lifetime_cycles: t,
                censored: false,
                failure_triple: Some(triple),
                n_posterior_updates: updates,
                estimator_error,
                grid_restarted: restarted,
                seed: cfg.seed,
            });
        }
        let Some(g) = grid.as_mut() else {
            continue;
        };
        match g.update(triple, &control) {
            Ok(()) => updates += 1,
            Err(Error::GridExhausted) if !restarted => {
                *g = build_grid(cfg, &ch, &mut rng)?;
                restarted = true;
                mle = None;
            }
            Err(Error::GridExhausted) => {}
            Err(e) => return Err(e),
        }
        if mle != Some(g.mle_index()) {
            mle = Some(g.mle_index());
            control = g.mle_control()?.1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::effective_rates;
    use crate::codes::{code_by_name, p_fail_exact};
    use crate::seed::mix64;

    fn code15() -> AsymmetricCode {
        code_by_name("15-1-7-3").unwrap()
    }

    fn ecc() -> Eccentricities {
        Eccentricities::new(0.7, 0.2, 0.1).unwrap()
    }

    #[test]
    fn zero_noise_is_censored() {
        let mut cfg = UnitalTrialConfig::new(code15(), 0.0, ecc(), 10);
        cfg.max_cycles = 500;
        let r = run_unital_trial(&cfg).unwrap();
        assert!(r.censored);
        assert_eq!(r.lifetime_cycles, 500);
    }

    #[test]
    fn validation() {
        let mut cfg = UnitalTrialConfig::new(code15(), 0.01, ecc(), 10);
        assert!(cfg.validate().is_ok());
        cfg.n_points = 0;
        assert!(cfg.validate().is_err());
        cfg.n_points = 1;
        cfg.p = 0.6;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let mut cfg = UnitalTrialConfig::new(code15(), 0.01, ecc(), 50);
        cfg.seed = 3;
        assert_eq!(run_unital_trial(&cfg).unwrap(), run_unital_trial(&cfg).unwrap());
    }

    #[test]
    fn planted_single_point_matches_optimal_rate() {
        let p = 0.003;
        let mut cfg = UnitalTrialConfig::new(code15(), p, ecc(), 1);
        cfg.plant_truth = true;
        let trials = 500;
        let mut sum = 0.0;
        let mut expect = 0.0;
        for i in 0..trials {
            let c = cfg.with_seed(mix64(11, i));
            let r = run_unital_trial(&c).unwrap();
            assert!(!r.censored);
            assert!(r.estimator_error.unwrap() < 1e-12);
            sum += r.lifetime_cycles as f64;
            // the optimal rate does not depend on the orientation
            let mut rng = trial_rng(c.seed);
            let ch = OrientedPauliChannel::new(p, ecc(), haar_rotation(&mut rng)).unwrap();
            let ctrl = optimal_control(&ch.error_matrix()).unwrap();
            expect += 1.0 / p_fail_exact(&code15(), &effective_rates(&ch, &ctrl));
        }
        let (mean, expect) = (sum / trials as f64, expect / trials as f64);
        assert!((mean / expect - 1.0).abs() < 0.1, "mean {mean} vs {expect}");
    }

    #[test]
    fn fixed_and_oracle_report_no_estimator() {
        let mut cfg = UnitalTrialConfig::new(code15(), 0.02, ecc(), 10);
        for s in [Strategy::Fixed, Strategy::Oracle] {
            cfg.strategy = s;
            let r = run_unital_trial(&cfg).unwrap();
            assert!(r.estimator_error.is_none());
            assert_eq!(r.n_posterior_updates, 0);
        }
    }

    #[test]
    fn adaptive_trial_updates_posterior() {
        let mut cfg = UnitalTrialConfig::new(code15(), 0.01, ecc(), 200);
        cfg.seed = 4;
        let r = run_unital_trial(&cfg).unwrap();
        assert!(r.n_posterior_updates > 0);
        assert!(!cfg.code.correctable(r.failure_triple.unwrap()));
    }
}
