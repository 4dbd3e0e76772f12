//! Randomized-grid Bayesian estimator over oriented Pauli channels.
//!
//! Each candidate is a trace-one matrix `X = Q_Xᵀ diag(x1, x2, x3) Q_X`
//! with `x1 ~ U[0,1]`, `x2 ~ U[0, 1 − x1]`, `x3 = 1 − x1 − x2` and Haar
//! `Q_X`. An error cycle with weights `(wx, wy, wz)` observed under control
//! `Q̂` multiplies candidate `i` by `kx^wx · ky^wy · kz^wz`, where
//! `(kx, ky, kz) = diag(Q̂ X_i Q̂ᵀ)`. The total rate `p` cancels, so it never
//! needs to be known.

use rand::Rng;

use crate::channel::{optimal_control, Eccentricities};
use crate::codes::WeightTriple;
use crate::error::{Error, Result};
use crate::geom3::{haar_rotation, sym_frobenius_distance, Rotation3, SymMat3};

/// Candidates this far below the best (in nats) stop receiving updates.
pub const PRUNE_NATS: f64 = 46.0;
const MIN_RATE: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub matrix: SymMat3,
    /// Sampled eigenvalues `(x1, x2, x3)` in sampling order.
    pub ecc: Eccentricities,
    pub orientation: Rotation3,
}

impl Candidate {
    pub fn new(ecc: Eccentricities, orientation: Rotation3) -> Self {
        Self {
            matrix: crate::channel::oriented_matrix(ecc, &orientation),
            ecc,
            orientation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Status {
    Active,
    /// Frozen normalized log-weight at the time of pruning.
    Pruned(f64),
    Eliminated,
}

#[derive(Clone, Debug)]
pub struct ChannelGrid {
    candidates: Vec<Candidate>,
    /// Log-weights relative to the best active candidate (max is 0).
    log_weights: Vec<f64>,
    status: Vec<Status>,
    /// Active indices in ascending order.
    active: Vec<usize>,
    /// log Σ_active exp(log_weights).
    log_norm: f64,
    mle_index: usize,
}

/// Draws one random grid point.
pub fn sample_candidate<R: Rng + ?Sized>(rng: &mut R) -> Candidate {
    let x1: f64 = rng.random();
    let x2: f64 = rng.random::<f64>() * (1.0 - x1);
    let x3 = (1.0 - x1 - x2).max(0.0);
    let ecc = Eccentricities { k1: x1, k2: x2, k3: x3 };
    Candidate::new(ecc, haar_rotation(rng))
}

/// Grid of `n_points` random candidates under a uniform prior.
pub fn sample_grid<R: Rng + ?Sized>(n_points: usize, rng: &mut R) -> Result<ChannelGrid> {
    if n_points == 0 {
        return Err(Error::invalid("channel grid needs at least one point"));
    }
    ChannelGrid::from_candidates((0..n_points).map(|_| sample_candidate(rng)).collect())
}

impl ChannelGrid {
    pub fn from_candidates(candidates: Vec<Candidate>) -> Result<Self> {
        let n = candidates.len();
        if n == 0 {
            return Err(Error::invalid("channel grid needs at least one point"));
        }
        Ok(Self {
            candidates,
            log_weights: vec![0.0; n],
            status: vec![Status::Active; n],
            active: (0..n).collect(),
            log_norm: (n as f64).ln(),
            mle_index: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn n_active(&self) -> usize {
        self.active.len()
    }

    pub fn mle_index(&self) -> usize {
        self.mle_index
    }

    pub fn mle_matrix(&self) -> &SymMat3 {
        &self.candidates[self.mle_index].matrix
    }

    /// Normalized log-posterior of candidate `i`.
    pub fn log_weight(&self, i: usize) -> f64 {
        match self.status[i] {
            Status::Active => self.log_weights[i] - self.log_norm,
            Status::Pruned(v) => v,
            Status::Eliminated => f64::NEG_INFINITY,
        }
    }

    pub fn normalized_log_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.log_weight(i)).collect()
    }

    /// Posterior update for one error cycle observed under `control`.
    ///
    /// If every candidate would be eliminated the grid is left unchanged and
    /// [`Error::GridExhausted`] is returned.
    pub fn update(&mut self, t: WeightTriple, control: &Rotation3) -> Result<()> {
        if t.is_zero() {
            return Ok(());
        }
        let q = control.matrix();
        let rows = [q.row(0), q.row(1), q.row(2)];
        let counts = [t.wx, t.wy, t.wz];
        let mut new = Vec::with_capacity(self.active.len());
        let mut best = f64::NEG_INFINITY;
        for &i in &self.active {
            let x = &self.candidates[i].matrix;
            let mut lw = self.log_weights[i];
            for (row, &w) in rows.iter().zip(&counts) {
                if w == 0 {
                    continue;
                }
                let k = x.quad(*row);
                if k <= 0.0 {
                    lw = f64::NEG_INFINITY;
                    break;
                }
                lw += f64::from(w) * k.clamp(MIN_RATE, 1.0).ln();
            }
            best = best.max(lw);
            new.push(lw);
        }
        if best == f64::NEG_INFINITY {
            return Err(Error::GridExhausted);
        }

        let mut sum = 0.0;
        for (&i, &lw) in self.active.iter().zip(&new) {
            self.log_weights[i] = lw - best;
            if lw != f64::NEG_INFINITY {
                sum += (lw - best).exp();
            }
        }
        let log_norm = sum.ln();

        let mut kept = Vec::with_capacity(self.active.len());
        let mut mle = None;
        for &i in &self.active {
            let lw = self.log_weights[i];
            if lw == f64::NEG_INFINITY {
                self.status[i] = Status::Eliminated;
            } else if lw < -PRUNE_NATS {
                self.status[i] = Status::Pruned(lw - log_norm);
            } else {
                if mle.is_none() && lw == 0.0 {
                    mle = Some(i);
                }
                kept.push(i);
            }
        }
        self.active = kept;
        self.log_norm = log_norm;
        self.mle_index = mle.expect("best candidate is always kept");
        Ok(())
    }

    /// Maximum-posterior candidate and the counter-rotation that aligns it.
    pub fn mle_control(&self) -> Result<(SymMat3, Rotation3)> {
        let x = *self.mle_matrix();
        Ok((x, optimal_control(&x)?))
    }

    /// `min_i ‖X_i − a‖_F`.
    pub fn min_distance(&self, a: &SymMat3) -> f64 {
        min_distance(&self.candidates, a)
    }
}

pub fn min_distance(candidates: &[Candidate], a: &SymMat3) -> f64 {
    candidates
        .iter()
        .map(|c| sym_frobenius_distance(&c.matrix, a))
        .fold(f64::INFINITY, f64::min)
}
