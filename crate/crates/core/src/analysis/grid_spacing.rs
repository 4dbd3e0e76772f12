//! How close a randomized channel grid gets to a fixed channel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::Eccentricities;
use crate::error::{Error, Result};
use crate::geom3::{sym_frobenius_distance, SymMat3};
use crate::grid_estimator::sample_candidate;
use crate::seed::{mix64, trial_rng};

/// `ε⁵ / (2¹² √2 · 3³ · a₁² a₂ a₃)`: the per-point probability of landing
/// within `ε` of a channel with eccentricities `(a₁, a₂, a₃)`.
pub fn lemma2_point_probability(eps: f64, ecc: Eccentricities) -> f64 {
    let denom = 4096.0 * std::f64::consts::SQRT_2 * 27.0 * ecc.k1 * ecc.k1 * ecc.k2 * ecc.k3;
    eps.powi(5) / denom
}

/// `1 − (1 − q)^N` with `q` from [`lemma2_point_probability`], in `[0, 1]`.
pub fn lemma2_bound(eps: f64, n_points: u64, ecc: Eccentricities) -> f64 {
    if !(eps > 0.0) {
        return 0.0;
    }
    let q = lemma2_point_probability(eps, ecc);
    if !(q < 1.0) {
        return 1.0;
    }
    (-(n_points as f64 * (-q).ln_1p()).exp_m1()).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpacingRow {
    pub n_points: u64,
    pub mean_min_distance: f64,
    pub std_error: f64,
    /// `(ε, fraction of grids with min-distance < ε, Lemma-2 bound)`.
    pub cdf: Vec<(f64, f64, f64)>,
}

/// Minimum Frobenius distance from `target` over `n_points` fresh random
/// candidates.
pub fn sample_min_distance<R: rand::Rng + ?Sized>(target: &SymMat3, n_points: u64, rng: &mut R) -> f64 {
    (0..n_points)
        .map(|_| sym_frobenius_distance(&sample_candidate(rng).matrix, target))
        .fold(f64::INFINITY, f64::min)
}

/// For each grid size, the mean minimum distance from `diag(ecc)` over
/// `trials` independent grids, with the empirical CDF at each `eps` next to
/// the Lemma-2 bound. The grid distribution is rotation invariant, so the
/// target's orientation does not matter.
pub fn grid_spacing_study(
    ecc: Eccentricities,
    n_points_list: &[u64],
    trials: u64,
    eps_list: &[f64],
    seed: u64,
) -> Result<Vec<GridSpacingRow>> {
    if n_points_list.is_empty() || n_points_list.contains(&0) {
        return Err(Error::invalid("grid sizes must be a non-empty list of positive integers"));
    }
    if trials == 0 {
        return Err(Error::invalid("grid spacing study needs at least one trial"));
    }
    let target = SymMat3::diag(ecc.as_array());
    Ok(n_points_list
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let dists: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(mix64(mix64(seed, k as u64), t));
                    sample_min_distance(&target, n, &mut rng)
                })
                .collect();
            let (mean, se) = super::stats::mean_and_se(&dists);
            let cdf = eps_list
                .iter()
                .map(|&e| {
                    let frac = dists.iter().filter(|&&d| d < e).count() as f64 / trials as f64;
                    (e, frac, lemma2_bound(e, n, ecc))
                })
                .collect();
            GridSpacingRow {
                n_points: n,
                mean_min_distance: mean,
                std_error: se,
                cdf,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::power_law_fit;

    fn ecc() -> Eccentricities {
        Eccentricities::new(0.7, 0.2, 0.1).unwrap()
    }

    #[test]
    fn bound_limits() {
        assert_eq!(lemma2_bound(0.0, 1000, ecc()), 0.0);
        assert!(lemma2_bound(1e-6, 1000, ecc()) < 1e-20);
        assert!(lemma2_bound(0.3, u64::MAX, ecc()) > 1.0 - 1e-12);
        let b = lemma2_bound(0.2, 30_000, ecc());
        assert!((0.0..=1.0).contains(&b));
    }

    #[test]
    fn small_eps_linearization() {
        let (eps, n) = (0.05, 30_000);
        let lin = n as f64 * lemma2_point_probability(eps, ecc());
        assert!((lemma2_bound(eps, n, ecc()) / lin - 1.0).abs() < 0.01);
    }

    #[test]
    fn coefficient_at_reference_grid() {
        // N = 30000 at (0.7, 0.2, 0.1) gives ≈ 19.6 ε⁵
        let c = 30_000.0 * lemma2_point_probability(1.0, ecc());
        assert!((c - 19.57).abs() < 0.01, "{c}");
    }

    #[test]
    fn single_point_is_mean_pairwise_distance() {
        let rows = grid_spacing_study(ecc(), &[1], 20_000, &[], 4).unwrap();
        let target = SymMat3::diag(ecc().as_array());
        let mut rng = trial_rng(99);
        let direct: Vec<f64> = (0..20_000)
            .map(|_| sym_frobenius_distance(&sample_candidate(&mut rng).matrix, &target))
            .collect();
        let (m, se) = crate::analysis::stats::mean_and_se(&direct);
        assert!((rows[0].mean_min_distance - m).abs() < 4.0 * (se + rows[0].std_error));
    }

    #[test]
    fn min_distance_shrinks_like_fifth_root() {
        let sizes = [100, 1000, 10_000];
        let rows = grid_spacing_study(ecc(), &sizes, 60, &[0.1, 0.2, 0.3], 5).unwrap();
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n_points as f64, r.mean_min_distance)).collect();
        let fit = power_law_fit(&pts).unwrap();
        assert!((fit.slope + 0.2).abs() < 0.05, "slope {}", fit.slope);
        for r in &rows {
            for &(_, emp, bound) in &r.cdf {
                assert!(emp >= bound, "{r:?}");
            }
        }
    }

    #[test]
    fn rejects_empty_input() {
        assert!(grid_spacing_study(ecc(), &[], 10, &[0.1], 0).is_err());
        assert!(grid_spacing_study(ecc(), &[10], 0, &[0.1], 0).is_err());
    }
}
