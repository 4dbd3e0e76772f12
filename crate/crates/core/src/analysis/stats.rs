//! Lifetime summaries and Kolmogorov–Smirnov tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::TrialResult;

/// Histogram bins per decade for the lifetime mode.
pub const MODE_BINS_PER_DECADE: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifetimeSummary {
    pub mean: f64,
    pub std_error: f64,
    pub median: f64,
    /// Geometric mean of the lifetimes in the fullest log₁₀ bin.
    pub mode: f64,
    /// Uncensored trials entering the statistics.
    pub n_trials: usize,
    pub n_censored: usize,
}

/// Summary over uncensored results; censored ones are only counted.
pub fn lifetime_stats(results: &[TrialResult]) -> Result<LifetimeSummary> {
    let lifetimes: Vec<f64> = results
        .iter()
        .filter(|r| !r.censored)
        .map(|r| r.lifetime_cycles as f64)
        .collect();
    summarize(&lifetimes, results.len() - lifetimes.len())
}

/// Summary of positive lifetimes, plus a count of censored trials.
pub fn summarize(lifetimes: &[f64], n_censored: usize) -> Result<LifetimeSummary> {
    if lifetimes.is_empty() {
        return Err(Error::AllCensored(n_censored));
    }
    if lifetimes.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::invalid("lifetimes must be positive and finite"));
    }
    let n = lifetimes.len();
    let (mean, std_error) = mean_and_se(lifetimes);
    let mut sorted = lifetimes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Ok(LifetimeSummary {
        mean,
        std_error,
        median,
        mode: log_binned_mode(&sorted),
        n_trials: n,
        n_censored,
    })
}

/// Sample mean and its standard error (zero for a single value).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mode on log₁₀-spaced bins, ten per decade; ties go to the lower bin.
fn log_binned_mode(sorted: &[f64]) -> f64 {
    let bin = |x: f64| (x.log10() * MODE_BINS_PER_DECADE).floor() as i64;
    let (mut best_bin, mut best_count) = (bin(sorted[0]), 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let b = bin(sorted[i]);
        let j = i + sorted[i..].iter().take_while(|&&x| bin(x) == b).count();
        if j - i > best_count {
            best_bin = b;
            best_count = j - i;
        }
        i = j;
    }
    let members: Vec<f64> = sorted.iter().copied().filter(|&x| bin(x) == best_bin).collect();
    (members.iter().map(|x| x.ln()).sum::<f64>() / members.len() as f64).exp()
}

/// Two-sample KS statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("KS test needs two non-empty samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    Ok((d, kolmogorov_q(ks_lambda(ne, d))))
}

/// One-sample KS statistic against a continuous CDF, with p-value.
pub fn ks_one_sample<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::invalid("KS test needs a non-empty sample"));
    }
    let mut xs = data.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok((d, kolmogorov_q(ks_lambda(n, d))))
}

fn ks_lambda(ne: f64, d: f64) -> f64 {
    let s = ne.sqrt();
    (s + 0.12 + 0.11 / s) * d
}

/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`, the Kolmogorov tail.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::trial_rng;
    use crate::simulation::sampling::geometric;
    use rand::Rng;

    fn result(lifetime: u64, censored: bool) -> TrialResult {
        TrialResult {
            lifetime_cycles: lifetime,
            censored,
            failure_triple: None,
            n_posterior_updates: 0,
            estimator_error: None,
            grid_restarted: false,
            seed: 0,
        }
    }

    #[test]
    fn single_result() {
        let s = lifetime_stats(&[result(1234, false)]).unwrap();
        assert_eq!(s.mean, 1234.0);
        assert_eq!(s.median, 1234.0);
        assert!((s.mode - 1234.0).abs() < 1e-9);
        assert_eq!(s.std_error, 0.0);
        assert_eq!((s.n_trials, s.n_censored), (1, 0));
    }

    #[test]
    fn censored_excluded_and_counted() {
        let rs = [result(10, false), result(1 << 40, true), result(30, false)];
        let s = lifetime_stats(&rs).unwrap();
        assert_eq!(s.mean, 20.0);
        assert_eq!(s.median, 20.0);
        assert_eq!((s.n_trials, s.n_censored), (2, 1));
        assert_eq!(lifetime_stats(&[result(5, true)]), Err(Error::AllCensored(1)));
        assert_eq!(lifetime_stats(&[]), Err(Error::AllCensored(0)));
    }

    #[test]
    fn mode_picks_fullest_log_bin() {
        // 10^0.2 ≤ x < 10^0.3 holds three values; the bin [100, 125.9) holds two
        let s = summarize(&[1.6, 1.7, 1.8, 100.0, 110.0], 0).unwrap();
        let expect = (1.6f64 * 1.7 * 1.8).powf(1.0 / 3.0);
        assert!((s.mode - expect).abs() < 1e-12);
    }

    #[test]
    fn geometric_sample_mean() {
        let mut rng = trial_rng(12);
        let r = 1e-3;
        let xs: Vec<f64> = (0..10_000).map(|_| geometric(r, &mut rng).unwrap() as f64).collect();
        let s = summarize(&xs, 0).unwrap();
        assert!((s.mean - 1.0 / r).abs() < 3.0 * s.std_error, "{s:?}");
        // median of Geometric(r) is ≈ ln 2 / r
        assert!((s.median * r / std::f64::consts::LN_2 - 1.0).abs() < 0.05);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // tabulated: Q(1.36) ≈ 0.0494, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 5e-4);
        assert!((kolmogorov_q(1.63) - 0.0098).abs() < 2e-4);
        assert_eq!(kolmogorov_q(0.0), 1.0);
        assert!(kolmogorov_q(5.0) < 1e-20);
    }

    #[test]
    fn ks_same_distribution_is_not_rejected() {
        let mut rng = trial_rng(13);
        let a: Vec<f64> = (0..2000).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.random()).collect();
        let (d, p) = ks_two_sample(&a, &b).unwrap();
        assert!(d < 0.06 && p > 0.001, "d={d} p={p}");
        let (d1, p1) = ks_one_sample(&a, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d1 < 0.04 && p1 > 0.001);
    }

    #[test]
    fn ks_detects_shift() {
        let mut rng = trial_rng(14);
        let a: Vec<f64> = (0..2000).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.random::<f64>() + 0.1).collect();
        let (d, p) = ks_two_sample(&a, &b).unwrap();
        assert!(d > 0.07 && p < 1e-6);
    }

    #[test]
    fn ks_statistic_by_hand() {
        let (d, _) = ks_two_sample(&[1.0, 2.0, 3.0], &[2.5, 3.5]).unwrap();
        // ECDFs at 2: 2/3 vs 0
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
        let (d, _) = ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(d, 0.0);
    }
}
