//! Discretized Bayesian posterior over a dephasing angle in `[0, π)`.
//!
//! Cell `j` of an `N`-cell grid represents the midpoint `(j + ½)π/N`.
//! Weights are kept as logarithms so that bulk updates with X-error counts
//! in the 10¹⁴ range stay finite.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian kernel support in standard deviations.
const KERNEL_SIGMAS: f64 = 6.0;

#[derive(Clone, Debug, PartialEq)]
pub struct AngleGrid {
    log_weights: Vec<f64>,
    mle_index: usize,
    likelihood: Likelihood,
}

/// How a cell's likelihood is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Likelihood {
    /// At the cell midpoint. A Z error observed at `θ̂` zeroes the cell
    /// holding `θ̂`, permanently.
    #[default]
    Midpoint,
    /// Mean over `nodes` equally spaced interior points of the cell, so the
    /// weights describe a piecewise-constant density. No cell is zeroed by
    /// an observation made at its own midpoint when `nodes` is even.
    CellAverage { nodes: u32 },
}

/// Brownian drift of the true angle, `θ_{t+1} = θ_t + u`, `u ~ N(0, κ²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftModel {
    pub kappa_sq: f64,
}

impl DriftModel {
    pub fn new(kappa_sq: f64) -> Result<Self> {
        if !(kappa_sq >= 0.0) || !kappa_sq.is_finite() {
            return Err(Error::invalid(format!(
                "drift variance must be non-negative, got {kappa_sq}"
            )));
        }
        Ok(Self { kappa_sq })
    }
}

/// Circular Gaussian kernel discretized at cell resolution.
#[derive(Clone, Debug)]
pub struct DriftKernel {
    n_cells: usize,
    /// (offset mod N, weight), weights summing to one
    taps: Vec<(usize, f64)>,
}

impl DriftKernel {
    pub fn new(n_cells: usize, drift: DriftModel) -> Self {
        let mut circ = vec![0.0; n_cells];
        let width = PI / n_cells as f64;
        let sigma = drift.kappa_sq.sqrt();
        let reach = if sigma > 0.0 {
            (KERNEL_SIGMAS * sigma / width).floor() as i64
        } else {
            0
        };
        for d in -reach..=reach {
            let x = d as f64 * width;
            let w = if sigma > 0.0 {
                (-x * x / (2.0 * drift.kappa_sq)).exp()
            } else {
                1.0
            };
            circ[d.rem_euclid(n_cells as i64) as usize] += w;
        }
        let total: f64 = circ.iter().sum();
        let taps = circ
            .into_iter()
            .enumerate()
            .filter(|(_, w)| *w > 0.0)
            .map(|(i, w)| (i, w / total))
            .collect();
        Self { n_cells, taps }
    }

    pub fn is_identity(&self) -> bool {
        self.taps.len() == 1 && self.taps[0].0 == 0
    }

    /// Kernel weights indexed by circular offset.
    pub fn weights(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cells];
        for &(i, w) in &self.taps {
            out[i] = w;
        }
        out
    }
}

/// `⌈1/p⌉` cells, enough to push the residual Z rate down to `O(p³)`.
pub fn recommended_cells(p: f64) -> usize {
    ((1.0 / p).ceil() as usize).max(2)
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

impl AngleGrid {
    /// Uniform belief over `n_cells` cells.
    pub fn new_uniform(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::invalid(format!(
                "angle grid needs at least 2 cells, got {n_cells}"
            )));
        }
        let lw = -(n_cells as f64).ln();
        Ok(Self {
            log_weights: vec![lw; n_cells],
            mle_index: 0,
            likelihood: Likelihood::Midpoint,
        })
    }

    /// Grid from arbitrary non-negative weights (normalized here).
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::invalid("angle grid needs at least 2 cells"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        let mut g = Self {
            log_weights: weights.iter().map(|w| w.ln()).collect(),
            mle_index: 0,
            likelihood: Likelihood::Midpoint,
        };
        g.normalize()?;
        Ok(g)
    }

    /// Point mass on the cell containing `theta`.
    pub fn peaked_at(n_cells: usize, theta: f64) -> Result<Self> {
        let mut g = Self::new_uniform(n_cells)?;
        let j = g.cell_of(theta);
        g.log_weights.iter_mut().for_each(|w| *w = f64::NEG_INFINITY);
        g.log_weights[j] = 0.0;
        g.mle_index = j;
        Ok(g)
    }

    pub fn with_likelihood(mut self, likelihood: Likelihood) -> Result<Self> {
        if let Likelihood::CellAverage { nodes: 0 } = likelihood {
            return Err(Error::invalid("cell average needs at least one node"));
        }
        self.likelihood = likelihood;
        Ok(self)
    }

    pub fn likelihood(&self) -> Likelihood {
        self.likelihood
    }

    pub fn n_cells(&self) -> usize {
        self.log_weights.len()
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * PI / self.n_cells() as f64
    }

    /// Index of the cell containing `theta` (wrapped into `[0, π)`).
    pub fn cell_of(&self, theta: f64) -> usize {
        let n = self.n_cells();
        let t = crate::channel::wrap_angle(theta);
        ((t / PI * n as f64).floor() as usize).min(n - 1)
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|l| l.exp()).collect()
    }

    pub fn mle_index(&self) -> usize {
        self.mle_index
    }

    /// Midpoint of the highest-weight cell, lowest index on ties.
    pub fn mle(&self) -> f64 {
        self.midpoint(self.mle_index)
    }

    fn normalize(&mut self) -> Result<()> {
        let lse = log_sum_exp(&self.log_weights);
        if !lse.is_finite() {
            return Err(Error::DegeneratePosterior);
        }
        self.log_weights.iter_mut().for_each(|w| *w -= lse);
        self.mle_index = argmax(&self.log_weights);
        Ok(())
    }

    /// Bayes update for `wx` X errors and `wz` Z errors observed with the
    /// stabilizers aligned to `theta_hat`: each cell is multiplied by
    /// `cos^{2wx}(θ − θ̂) · sin^{2wz}(θ − θ̂)`, evaluated per the grid's
    /// [`Likelihood`].
    ///
    /// On a degenerate result the grid is left untouched.
    pub fn update(&mut self, wx: u64, wz: u64, theta_hat: f64) -> Result<()> {
        if wx == 0 && wz == 0 {
            return Ok(());
        }
        let (ax, az) = (2.0 * wx as f64, 2.0 * wz as f64);
        let log_lik = |theta: f64| {
            let (s, c) = (theta - theta_hat).sin_cos();
            let mut l = 0.0;
            if wx > 0 {
                l += ax * c.abs().ln();
            }
            if wz > 0 {
                l += az * s.abs().ln();
            }
            l
        };
        let n = self.n_cells() as f64;
        let width = PI / n;
        let prev = self.log_weights.clone();
        let mut nodes = Vec::new();
        for (j, lw) in self.log_weights.iter_mut().enumerate() {
            if *lw == f64::NEG_INFINITY {
                continue;
            }
            match self.likelihood {
                Likelihood::Midpoint => *lw += log_lik((j as f64 + 0.5) * width),
                Likelihood::CellAverage { nodes: m } => {
                    nodes.clear();
                    nodes.extend((0..m).map(|k| {
                        log_lik((j as f64 + (k as f64 + 0.5) / m as f64) * width)
                    }));
                    *lw += log_sum_exp(&nodes) - (m as f64).ln();
                }
            }
        }
        if let Err(e) = self.normalize() {
            self.log_weights = prev;
            self.mle_index = argmax(&self.log_weights);
            return Err(e);
        }
        Ok(())
    }

    /// Bulk update after `n_x` X errors followed by one Z error, all under
    /// the same alignment `theta_hat`.
    pub fn bulk_update(&mut self, n_x: u64, theta_hat: f64) -> Result<()> {
        self.update(n_x, 1, theta_hat)
    }

    /// One cycle of Brownian drift: circular convolution with a Gaussian of
    /// variance κ².
    pub fn drift_step(&mut self, drift: DriftModel) {
        let kernel = DriftKernel::new(self.n_cells(), drift);
        self.drift_step_with(&kernel);
    }

    /// [`drift_step`](Self::drift_step) with a prebuilt kernel.
    pub fn drift_step_with(&mut self, kernel: &DriftKernel) {
        assert_eq!(kernel.n_cells, self.n_cells(), "kernel built for another grid size");
        if kernel.is_identity() {
            return;
        }
        let n = self.n_cells();
        let max = self.log_weights[self.mle_index];
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - max).exp()).collect();
        let mut out = vec![0.0; n];
        for (j, &wj) in w.iter().enumerate() {
            if wj == 0.0 {
                continue;
            }
            for &(d, k) in &kernel.taps {
                let i = if j + d >= n { j + d - n } else { j + d };
                out[i] += wj * k;
            }
        }
        for (lw, o) in self.log_weights.iter_mut().zip(out) {
            *lw = o.ln() + max;
        }
        // mass is preserved up to rounding, renormalizing keeps the invariant tight
        self.normalize()
            .expect("convolution of a normalized grid cannot vanish");
    }
}
