//! Trials under single-angle dephasing with an angle-grid estimator.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::sampling::{
    binomial_at_least, binomial_u64, binomial_upper_tail, geometric, prob_any, sample_error_cycle,
    truncated_binomial,
};
use super::{Engine, Strategy, TrialResult, DEFAULT_MAX_CYCLES, MAX_CYCLES_LIMIT};
use crate::angle_estimator::{AngleGrid, DriftModel, Likelihood};
use crate::channel::{angle_distance, twirl_dephasing, DephasingChannel};
use crate::codes::{AsymmetricCode, WeightTriple};
use crate::error::{Error, Result};
use crate::seed::{trial_rng, TrialRng};

/// Drift variances above this wrap the circle many times over; the kernel is
/// capped here, where it is uniform to double precision.
const MAX_DRIFT_VARIANCE: f64 = 4.0 * PI * PI;

pub const DEFAULT_LIKELIHOOD: Likelihood = Likelihood::CellAverage { nodes: 8 };

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theta0 {
    /// Uniform on `[0, π)`, drawn from the trial RNG.
    #[default]
    Random,
    Value(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingTrialConfig {
    pub code: AsymmetricCode,
    pub p: f64,
    pub theta0: Theta0,
    pub n_cells: usize,
    pub likelihood: Likelihood,
    /// Per-cycle variance of the true-angle random walk.
    pub kappa_sq: f64,
    pub engine: Engine,
    pub strategy: Strategy,
    pub max_cycles: u64,
    pub seed: u64,
}

impl DephasingTrialConfig {
    pub fn new(code: AsymmetricCode, p: f64, n_cells: usize) -> Self {
        Self {
            code,
            p,
            theta0: Theta0::Random,
            n_cells,
            likelihood: DEFAULT_LIKELIHOOD,
            kappa_sq: 0.0,
            engine: Engine::PerCycle,
            strategy: Strategy::Adaptive,
            max_cycles: DEFAULT_MAX_CYCLES,
            seed: 0,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if let Theta0::Value(t) = self.theta0 {
            if !t.is_finite() {
                return Err(Error::invalid("theta0 must be finite"));
            }
        }
        if self.n_cells < 2 {
            return Err(Error::invalid(format!("n_cells must be at least 2, got {}", self.n_cells)));
        }
        DriftModel::new(self.kappa_sq)?;
        if self.engine == Engine::FastForward && self.kappa_sq != 0.0 {
            return Err(Error::invalid("the fast-forward engine requires kappa_sq = 0"));
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

/// Runs the engine selected by `cfg.engine`.
pub fn run_dephasing(cfg: &DephasingTrialConfig) -> Result<TrialResult> {
    match cfg.engine {
        Engine::PerCycle => run_dephasing_trial(cfg),
        Engine::FastForward => run_dephasing_trial_fast(cfg),
    }
}

struct State {
    rng: TrialRng,
    ch: DephasingChannel,
    grid: AngleGrid,
    theta_hat: f64,
    strategy: Strategy,
    updates: u64,
}

impl State {
    fn new(cfg: &DephasingTrialConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = trial_rng(cfg.seed);
        let theta0 = match cfg.theta0 {
            Theta0::Random => rng.random::<f64>() * PI,
            Theta0::Value(t) => t,
        };
        let ch = DephasingChannel::new(cfg.p, theta0)?;
        let grid = AngleGrid::new_uniform(cfg.n_cells)?.with_likelihood(cfg.likelihood)?;
        let theta_hat = match cfg.strategy {
            Strategy::Oracle => ch.theta0(),
            _ => grid.mle(),
        };
        Ok(Self {
            rng,
            ch,
            grid,
            theta_hat,
            strategy: cfg.strategy,
            updates: 0,
        })
    }

    /// Applies an observation; a vanishing posterior leaves the grid as is.
    fn observe(&mut self, wx: u64, wz: u64) {
        if self.strategy != Strategy::Adaptive || (wx == 0 && wz == 0) {
            return;
        }
        if self.grid.update(wx, wz, self.theta_hat).is_ok() {
            self.updates += 1;
            self.theta_hat = self.grid.mle();
        }
    }

    /// `cycles` steps of the true-angle random walk and of the posterior
    /// prediction.
    fn drift(&mut self, kappa_sq: f64, cycles: u64) {
        if cycles == 0 || kappa_sq == 0.0 {
            return;
        }
        let var = kappa_sq * cycles as f64;
        let step: f64 = self.rng.sample(StandardNormal);
        self.ch.set_theta0(self.ch.theta0() + var.sqrt() * step);
        match self.strategy {
            Strategy::Adaptive => {
                let model = DriftModel {
                    kappa_sq: var.min(MAX_DRIFT_VARIANCE),
                };
                self.grid.drift_step(model);
                self.theta_hat = self.grid.mle();
            }
            Strategy::Oracle => self.theta_hat = self.ch.theta0(),
            Strategy::Fixed => {}
        }
    }

    fn finish(&self, lifetime: u64, triple: WeightTriple, seed: u64) -> TrialResult {
        TrialResult {
            lifetime_cycles: lifetime,
            censored: false,
            failure_triple: Some(triple),
            n_posterior_updates: self.updates,
            estimator_error: Some(angle_distance(self.theta_hat, self.ch.theta0())),
            grid_restarted: false,
            seed,
        }
    }

    fn censor(&self, max_cycles: u64, seed: u64) -> TrialResult {
        TrialResult {
            n_posterior_updates: self.updates,
            estimator_error: Some(angle_distance(self.theta_hat, self.ch.theta0())),
            ..TrialResult::censored(max_cycles, seed)
        }
    }
}

/// Cycle-by-cycle trial. Error-free cycles carry no information, so the run
/// jumps straight to the next cycle with at least one error; the total error
/// probability per cycle does not depend on the angle. With drift, the
/// skipped cycles are folded into one Gaussian step of matching variance.
pub fn run_dephasing_trial(cfg: &DephasingTrialConfig) -> Result<TrialResult> {
    let mut st = State::new(cfg)?;
    let n = cfg.code.n();
    let q_any = prob_any(cfg.p, n as u64);
    let mut t = 0u64;
    let mut pending_x = 0u64;
    loop {
        let Some(skip) = geometric(q_any, &mut st.rng) else {
            return Ok(st.censor(cfg.max_cycles, cfg.seed));
        };
        match t.checked_add(skip) {
            Some(next) if next <= cfg.max_cycles => t = next,
            _ => return Ok(st.censor(cfg.max_cycles, cfg.seed)),
        }
        st.drift(cfg.kappa_sq, skip - 1);
        let rates = twirl_dephasing(&st.ch, st.theta_hat);
        let triple = sample_error_cycle(&rates, n, &mut st.rng);
        if !cfg.code.correctable(triple) {
            return Ok(st.finish(t, triple, cfg.seed));
        }
        if cfg.kappa_sq > 0.0 {
            st.observe(triple.wx as u64, triple.wz as u64);
            st.drift(cfg.kappa_sq, 1);
        } else {
            pending_x += triple.wx as u64;
            if triple.wz > 0 {
                st.observe(pending_x, triple.wz as u64);
                pending_x = 0;
            }
        }
    }
}

/// Rare-event trial: only cycles with a Z error are visited. Between them
/// the X-error count is drawn in aggregate, and an X-only failure competes
/// with the next Z arrival as a second geometric clock.
pub fn run_dephasing_trial_fast(cfg: &DephasingTrialConfig) -> Result<TrialResult> {
    if cfg.kappa_sq != 0.0 {
        return Err(Error::invalid("the fast-forward engine requires kappa_sq = 0"));
    }
    let mut st = State::new(cfg)?;
    let n = cfg.code.n();
    let tx = cfg.code.tx();
    let mut t = 0u64;
    loop {
        let rates = twirl_dephasing(&st.ch, st.theta_hat);
        let pz = rates.pz;
        let px_given_no_z = if pz < 1.0 { (rates.px / (1.0 - pz)).min(1.0) } else { 0.0 };
        let q_z = prob_any(pz, n as u64);
        let q_fx = binomial_upper_tail(n, px_given_no_z, tx + 1);
        let t_z = geometric(q_z, &mut st.rng);
        let t_f = geometric(q_fx, &mut st.rng);
        let x_first = match (t_f, t_z) {
            (Some(f), Some(z)) => f < z,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if x_first {
            let f = t_f.expect("x-failure clock is finite");
            return Ok(match t.checked_add(f) {
                Some(end) if end <= cfg.max_cycles => {
                    let wx = binomial_at_least(n, px_given_no_z, tx + 1, &mut st.rng);
                    st.finish(end, WeightTriple::new(wx, 0, 0), cfg.seed)
                }
                _ => st.censor(cfg.max_cycles, cfg.seed),
            });
        }
        let Some(z) = t_z else {
            return Ok(st.censor(cfg.max_cycles, cfg.seed));
        };
        match t.checked_add(z) {
            Some(next) if next <= cfg.max_cycles => t = next,
            _ => return Ok(st.censor(cfg.max_cycles, cfg.seed)),
        }
        let quiet = (n as u64).saturating_mul(z - 1);
        let n_x = binomial_u64(quiet, px_given_no_z, &mut st.rng);
        let wz = truncated_binomial(n, pz, &mut st.rng);
        let wx = binomial_u64((n - wz) as u64, px_given_no_z, &mut st.rng) as u32;
        let triple = WeightTriple::new(wx, 0, wz);
        if !cfg.code.correctable(triple) {
            return Ok(st.finish(t, triple, cfg.seed));
        }
        st.observe(n_x + wx as u64, wz as u64);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PauliRates;
    use crate::codes::{code_by_name, p_fail_exact};

    fn code15() -> AsymmetricCode {
        code_by_name("15-1-7-3").unwrap()
    }

    fn mean_lifetime(cfg: &DephasingTrialConfig, trials: u64, fast: bool) -> f64 {
        let total: f64 = (0..trials)
            .map(|i| {
                let c = cfg.with_seed(crate::seed::mix64(cfg.seed, i));
                let r = if fast {
                    run_dephasing_trial_fast(&c)
                } else {
                    run_dephasing_trial(&c)
                }
                .unwrap();
                assert!(!r.censored);
                r.lifetime_cycles as f64
            })
            .sum();
        total / trials as f64
    }

    #[test]
    fn zero_noise_is_censored() {
        let mut cfg = DephasingTrialConfig::new(code15(), 0.0, 16);
        cfg.max_cycles = 1000;
        for engine in [Engine::PerCycle, Engine::FastForward] {
            cfg.engine = engine;
            let r = run_dephasing(&cfg).unwrap();
            assert!(r.censored);
            assert_eq!(r.lifetime_cycles, 1000);
            assert!(r.failure_triple.is_none());
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = DephasingTrialConfig::new(code15(), 0.01, 16);
        assert!(cfg.validate().is_ok());
        cfg.kappa_sq = 0.01;
        cfg.engine = Engine::FastForward;
        assert!(cfg.validate().is_err());
        assert!(run_dephasing_trial_fast(&cfg).is_err());
        cfg.engine = Engine::PerCycle;
        assert!(cfg.validate().is_ok());
        cfg.n_cells = 1;
        assert!(cfg.validate().is_err());
        cfg.n_cells = 16;
        cfg.max_cycles = 0;
        assert!(cfg.validate().is_err());
        cfg.max_cycles = u64::MAX;
        assert!(cfg.validate().is_err());
        cfg.max_cycles = 100;
        cfg.p = 1.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn same_seed_same_result() {
        let mut cfg = DephasingTrialConfig::new(code15(), 0.02, 32);
        cfg.seed = 99;
        for engine in [Engine::PerCycle, Engine::FastForward] {
            cfg.engine = engine;
            assert_eq!(run_dephasing(&cfg).unwrap(), run_dephasing(&cfg).unwrap());
        }
    }

    #[test]
    fn failures_are_uncorrectable() {
        let mut cfg = DephasingTrialConfig::new(code15(), 0.03, 32);
        for i in 0..50 {
            cfg.seed = i;
            for engine in [Engine::PerCycle, Engine::FastForward] {
                cfg.engine = engine;
                let r = run_dephasing(&cfg).unwrap();
                assert!(r.lifetime_cycles >= 1);
                assert!(!code15().correctable(r.failure_triple.unwrap()));
            }
        }
    }

    #[test]
    fn oracle_alignment_matches_exact_rate() {
        let p = 0.01;
        let mut cfg = DephasingTrialConfig::new(code15(), p, 64);
        cfg.strategy = Strategy::Oracle;
        cfg.seed = 5;
        let expect = 1.0 / p_fail_exact(&code15(), &PauliRates::new(p, 0.0, 0.0).unwrap());
        let mean = mean_lifetime(&cfg, 500, false);
        assert!((mean / expect - 1.0).abs() < 0.1, "mean {mean} vs {expect}");
    }

    #[test]
    fn aligned_fast_forward_is_geometric() {
        let p = 0.01;
        let mut cfg = DephasingTrialConfig::new(code15(), p, 64);
        cfg.strategy = Strategy::Oracle;
        cfg.engine = Engine::FastForward;
        cfg.seed = 6;
        let expect = 1.0 / p_fail_exact(&code15(), &PauliRates::new(p, 0.0, 0.0).unwrap());
        let mean = mean_lifetime(&cfg, 10_000, true);
        assert!((mean / expect - 1.0).abs() < 0.05, "mean {mean} vs {expect}");
    }

    #[test]
    fn adaptation_beats_fixed_alignment() {
        let p = 0.01;
        let mut cfg = DephasingTrialConfig::new(code15(), p, 256);
        cfg.seed = 7;
        let adaptive = mean_lifetime(&cfg, 500, false);
        cfg.strategy = Strategy::Fixed;
        let fixed = mean_lifetime(&cfg, 500, false);
        assert!(adaptive >= 5.0 * fixed, "adaptive {adaptive} vs fixed {fixed}");
    }

    #[test]
    fn drift_runs_and_tracks() {
        let mut cfg = DephasingTrialConfig::new(code15(), 0.01, 64);
        cfg.kappa_sq = 1e-4;
        cfg.seed = 8;
        let r = run_dephasing_trial(&cfg).unwrap();
        assert!(!r.censored);
        assert!(r.n_posterior_updates > 0);
        let e = r.estimator_error.unwrap();
        assert!((0.0..=PI / 2.0).contains(&e));
    }

    #[test]
    fn oracle_under_drift_stays_aligned() {
        let mut cfg = DephasingTrialConfig::new(code15(), 0.01, 64);
        cfg.kappa_sq = 0.01;
        cfg.strategy = Strategy::Oracle;
        cfg.seed = 9;
        let r = run_dephasing_trial(&cfg).unwrap();
        assert_eq!(r.failure_triple.unwrap().wz, 0);
    }
}
