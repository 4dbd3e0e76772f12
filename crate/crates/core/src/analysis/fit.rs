//! Log-log least-squares fits of lifetime against error rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Euclidean norm of the log-space residuals.
    pub residual_norm: f64,
    pub n_points: usize,
}

impl FitResult {
    /// Distance `d` whose failure weight `(d+1)/2` reproduces the slope.
    pub fn effective_distance(&self) -> f64 {
        2.0 * (-self.slope) - 1.0
    }

    /// Fitted lifetime at error rate `p`.
    pub fn predict(&self, p: f64) -> f64 {
        (self.intercept + self.slope * p.ln()).exp()
    }
}

/// Fits `ln t = intercept + slope · ln p` to `(p, t)` pairs.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|&(p, t)| !(p > 0.0 && t > 0.0 && p.is_finite() && t.is_finite())) {
        return Err(Error::invalid("power-law fit needs positive, finite p and lifetime"));
    }
    let xs: Vec<f64> = points.iter().map(|&(p, _)| p.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("power-law fit needs at least two distinct p"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_norm = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(FitResult {
        slope,
        intercept,
        residual_norm,
        n_points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::trial_rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [1e-2f64, 3e-3, 1e-3, 3e-4].iter().map(|&p| (p, p.powi(-4))).collect();
        let f = power_law_fit(&pts).unwrap();
        assert!((f.slope + 4.0).abs() < 1e-12);
        assert!((f.effective_distance() - 7.0).abs() < 1e-11);
        assert!(f.intercept.abs() < 1e-10);
        assert!(f.residual_norm < 1e-10);
        assert!((f.predict(1e-3) / 1e12 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn noisy_slope_recovered() {
        let mut rng = trial_rng(21);
        let ps: Vec<f64> = (0..9).map(|i| 10f64.powf(-2.0 - 0.375 * i as f64)).collect();
        for _ in 0..20 {
            let pts: Vec<(f64, f64)> = ps
                .iter()
                .map(|&p| {
                    let z: f64 = rng.sample(StandardNormal);
                    (p, 3.0 * p.powf(-3.99) * (0.05 * z).exp())
                })
                .collect();
            let f = power_law_fit(&pts).unwrap();
            assert!((f.slope + 3.99).abs() < 0.05, "slope {}", f.slope);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            power_law_fit(&[(0.1, 1.0), (0.2, 2.0)]),
            Err(Error::TooFewPoints { needed: 3, got: 2 })
        );
        assert!(power_law_fit(&[(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)]).is_err());
        assert!(power_law_fit(&[(0.1, 1.0), (0.1, 2.0), (0.1, 3.0)]).is_err());
    }
}
