//! Parallel execution of independent trials with per-trial seeds.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TrialResult;
use crate::error::{Error, Result};
use crate::seed::mix64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub trials: u64,
    pub base_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub parallelism: usize,
}

/// Outcome of trial `index`. Errors and panics become `Err` messages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub outcome: std::result::Result<TrialResult, String>,
}

/// Seed of trial `index`.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    mix64(base_seed, index)
}

fn run_one<F>(base_seed: u64, index: u64, trial: &F) -> TrialRecord
where
    F: Fn(u64) -> Result<TrialResult> + Sync,
{
    let seed = trial_seed(base_seed, index);
    let outcome = match catch_unwind(AssertUnwindSafe(|| trial(seed))) {
        Ok(Ok(r)) => Ok(r),
        Ok(Err(e)) => Err(e.to_string()),
        Err(payload) => Err(panic_message(payload.as_ref())),
    };
    TrialRecord { index, seed, outcome }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    let msg = payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".to_string());
    format!("trial panicked: {msg}")
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

/// Runs all trials; records come back in index order whatever the
/// parallelism.
pub fn run_ensemble<F>(cfg: &EnsembleConfig, trial: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(u64) -> Result<TrialResult> + Sync,
{
    run_ensemble_chunked(cfg, cfg.trials.max(1), trial, |_| Ok(()))
}

/// Like [`run_ensemble`], handing each completed chunk of `chunk` trials to
/// `on_chunk` in index order before starting the next.
pub fn run_ensemble_chunked<F, C>(cfg: &EnsembleConfig, chunk: u64, trial: F, mut on_chunk: C) -> Result<Vec<TrialRecord>>
where
    F: Fn(u64) -> Result<TrialResult> + Sync,
    C: FnMut(&[TrialRecord]) -> Result<()>,
{
    if chunk == 0 {
        return Err(Error::invalid("chunk size must be positive"));
    }
    let pool = pool(cfg.parallelism)?;
    let mut out = Vec::with_capacity(cfg.trials as usize);
    let mut start = 0;
    while start < cfg.trials {
        let end = (start + chunk).min(cfg.trials);
        let batch: Vec<TrialRecord> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| run_one(cfg.base_seed, i, &trial))
                .collect()
        });
        on_chunk(&batch)?;
        out.extend(batch);
        start = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::code_by_name;
    use crate::simulation::{run_dephasing_trial, DephasingTrialConfig};

    fn dephasing(seed: u64) -> Result<TrialResult> {
        let cfg = DephasingTrialConfig::new(code_by_name("15-1-7-3").unwrap(), 0.02, 32);
        run_dephasing_trial(&cfg.with_seed(seed))
    }

    #[test]
    fn seeds_follow_mixer() {
        let cfg = EnsembleConfig { trials: 5, base_seed: 42, parallelism: 1 };
        let recs = run_ensemble(&cfg, dephasing).unwrap();
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.index, i as u64);
            assert_eq!(r.seed, mix64(42, i as u64));
            assert_eq!(r.outcome.as_ref().unwrap().seed, r.seed);
        }
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let one = run_ensemble(&EnsembleConfig { trials: 40, base_seed: 7, parallelism: 1 }, dephasing).unwrap();
        let many = run_ensemble(&EnsembleConfig { trials: 40, base_seed: 7, parallelism: 8 }, dephasing).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn chunks_arrive_in_order() {
        let cfg = EnsembleConfig { trials: 25, base_seed: 1, parallelism: 2 };
        let mut sizes = Vec::new();
        let mut next = 0;
        let all = run_ensemble_chunked(&cfg, 10, dephasing, |batch| {
            sizes.push(batch.len());
            for r in batch {
                assert_eq!(r.index, next);
                next += 1;
            }
            Ok(())
        })
        .unwrap();
        assert_eq!(sizes, vec![10, 10, 5]);
        assert_eq!(all.len(), 25);
    }

    #[test]
    fn panics_and_errors_become_failed_records() {
        let cfg = EnsembleConfig { trials: 6, base_seed: 3, parallelism: 2 };
        let recs = run_ensemble(&cfg, |seed| {
            match seed % 3 {
                0 => panic!("boom"),
                1 => Err(Error::invalid("bad")),
                _ => dephasing(seed),
            }
        })
        .unwrap();
        assert_eq!(recs.len(), 6);
        for r in &recs {
            match r.seed % 3 {
                0 => assert!(r.outcome.as_ref().unwrap_err().contains("boom")),
                1 => assert!(r.outcome.as_ref().unwrap_err().contains("bad")),
                _ => assert!(r.outcome.is_ok()),
            }
        }
    }

    #[test]
    fn zero_trials() {
        let cfg = EnsembleConfig { trials: 0, base_seed: 3, parallelism: 1 };
        assert!(run_ensemble(&cfg, dephasing).unwrap().is_empty());
    }
}
