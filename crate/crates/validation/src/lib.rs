//! Shared plumbing for the acceptance suite: a criterion runner that prints
//! one verdict line per criterion, and ensemble helpers.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use aqec_core::simulation::{run_ensemble, EnsembleConfig, TrialResult};
use aqec_core::Result;

/// Verdict of one criterion, with the measured values behind it.
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub run: fn() -> Verdict,
}

/// Runs every criterion whose id equals one of `filters`, or whose title
/// contains a non-numeric one (all of them when `filters` is empty),
/// printing a `PASS`/`FAIL` line for each.
/// Returns the number of failures; a panic counts as a failure.
pub fn run_criteria(criteria: &[Criterion], filters: &[String]) -> usize {
    let selected: Vec<&Criterion> = criteria
        .iter()
        .filter(|c| {
            filters.is_empty()
                || filters.iter().any(|f| {
                    c.id == f || (!f.starts_with(|ch: char| ch.is_ascii_digit()) && c.title.contains(f.as_str()))
                })
        })
        .collect();
    // panics become FAIL verdicts carrying the message; keep stderr quiet
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for c in &selected {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|e| Verdict::new(false, format!("panicked: {}", panic_text(e.as_ref()))));
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] criterion {}: {} | {} ({:.1} s)",
            c.id,
            c.title,
            v.detail,
            start.elapsed().as_secs_f64()
        );
        failures += usize::from(!v.pass);
    }
    println!(
        "acceptance: {} passed, {} failed, {} run",
        selected.len() - failures,
        failures,
        selected.len()
    );
    failures
}

fn panic_text(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into())
}

/// Runs `trials` seeded trials on every core and returns the results in
/// trial order. Any failed trial aborts.
pub fn ensemble<F>(trials: u64, base_seed: u64, trial: F) -> Vec<TrialResult>
where
    F: Fn(u64) -> Result<TrialResult> + Sync,
{
    let cfg = EnsembleConfig {
        trials,
        base_seed,
        parallelism: 0,
    };
    run_ensemble(&cfg, trial)
        .expect("ensemble")
        .into_iter()
        .map(|r| r.outcome.expect("trial"))
        .collect()
}

pub fn lifetimes(results: &[TrialResult]) -> Vec<f64> {
    results.iter().map(|r| r.lifetime_cycles as f64).collect()
}

/// `|x / target − 1| ≤ rel`.
pub fn within_rel(x: f64, target: f64, rel: f64) -> bool {
    (x / target - 1.0).abs() <= rel
}
