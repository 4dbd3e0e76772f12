//! Haar averages, optimal-orientation gains and the code-performance curve.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{oriented_matrix, Eccentricities, PauliRates};
use crate::codes::{binomial, p_fail_leading, AsymmetricCode, TripleTable};
use crate::error::{Error, Result};
use crate::geom3::haar_rotation;
use crate::seed::{mix64, trial_rng};

/// Samples per independently seeded Monte Carlo block.
const BLOCK: u64 = 1 << 14;

/// Smallest sample count accepted by [`c_opt_numeric`].
pub const MIN_COPT_SAMPLES: u64 = 10_000;

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

/// Diagonal x-entry of a Haar-rotated `diag(k)` from sphere coordinates
/// `u ∈ [−1, 1]`, `v ∈ [0, 1)`.
pub fn haar_kx(ecc: Eccentricities, u: f64, v: f64) -> f64 {
    let (s, c) = (2.0 * std::f64::consts::PI * v).sin_cos();
    let r = 1.0 - u * u;
    ecc.k1 * u * u + ecc.k2 * r * s * s + ecc.k3 * r * c * c
}

/// Mean and standard error of `f` over `n` samples drawn block-wise by
/// `draw`, each block with its own seed. Deterministic for a given seed.
fn block_mean<D>(n: u64, seed: u64, draw: D) -> McEstimate
where
    D: Fn(&mut crate::seed::TrialRng) -> f64 + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = trial_rng(mix64(seed, b));
            let count = BLOCK.min(n - b * BLOCK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let x = draw(&mut rng);
                s += x;
                s2 += x * x;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = n as f64;
    let mean = s / nf;
    let var = if n > 1 { ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
    McEstimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        n_samples: n,
    }
}

/// Haar average of `(1 − kx)^{−exponent}`.
pub fn haar_average_coefficient(ecc: Eccentricities, exponent: i32, n_mc: u64, seed: u64) -> McEstimate {
    block_mean(n_mc, seed, |rng| {
        let u: f64 = rng.random_range(-1.0..1.0);
        let v: f64 = rng.random();
        (1.0 - haar_kx(ecc, u, v)).powi(-exponent)
    })
}

/// Ratio of the lifetime at the optimal orientation (`kx = k₁`) to the
/// Haar-averaged lifetime, both in the leading-order model
/// `t ∝ (1 − kx)^{−(tz+1)}`.
pub fn c_opt_numeric(code: &AsymmetricCode, ecc: Eccentricities, n_mc: u64, seed: u64) -> Result<McEstimate> {
    if n_mc < MIN_COPT_SAMPLES {
        return Err(Error::invalid(format!(
            "C_opt needs at least {MIN_COPT_SAMPLES} samples, got {n_mc}"
        )));
    }
    let e = (code.tz() + 1) as i32;
    let k1 = ecc.sorted_desc()[0];
    let best = (1.0 - k1).powi(-e);
    let avg = haar_average_coefficient(ecc, e, n_mc, seed);
    let value = best / avg.value;
    Ok(McEstimate {
        value,
        std_error: value * avg.std_error / avg.value,
        n_samples: n_mc,
    })
}

/// Closed-form sphere average of `(1 − k₁u² − k₃(1 − u²))^{−2}`, with `k₁`
/// the largest and `k₃` the smallest eccentricity. This is the Haar average
/// of `(1 − kx)^{−2}` with the middle eigenvalue lowered to `k₃`, so it
/// bounds that average from below. Equal extremes use the limit
/// `(1 − k₁)^{−2}`.
pub fn haar_lifetime_bound_closed(ecc: Eccentricities) -> f64 {
    let [k1, _, k3] = ecc.sorted_desc();
    if k1 >= 1.0 {
        return f64::INFINITY;
    }
    let d = k1 - k3;
    let x2 = d / (1.0 - k3);
    // atanh(x)/x, by series when x is tiny
    let atanh_over_x = if x2 < 1e-8 {
        1.0 + x2 / 3.0
    } else {
        let x = x2.sqrt();
        x.atanh() / x
    };
    // atanh(x) / (2(1−k3)√((1−k3)d)) with x = √(d/(1−k3))
    atanh_over_x / (2.0 * (1.0 - k3) * (1.0 - k3)) + 1.0 / (2.0 * (1.0 - k3) * (1.0 - k1))
}

/// `(1 − k₁)^{−2}`: the lifetime coefficient at the optimal orientation.
pub fn optimal_lifetime_coefficient(ecc: Eccentricities) -> f64 {
    (1.0 - ecc.sorted_desc()[0]).powi(-2)
}

/// `(2/3)^{tz} / (1 − k₁ + ε)^{tz}` for Frobenius error `ε`.
pub fn expected_code_performance(tz: u32, k1: f64, frob_err: f64) -> Result<f64> {
    if !(frob_err >= 0.0) || !(0.0..=1.0).contains(&k1) {
        return Err(Error::invalid("need frob_err ≥ 0 and k1 in [0, 1]"));
    }
    let t = tz as i32;
    Ok((2.0f64 / 3.0).powi(t) / (1.0 - k1 + frob_err).powi(t))
}

fn identity_control_rates(p: f64, ecc: Eccentricities, rng: &mut crate::seed::TrialRng) -> PauliRates {
    let d = oriented_matrix(ecc, &haar_rotation(rng)).diagonal();
    PauliRates {
        px: p * d[0].max(0.0),
        py: p * d[1].max(0.0),
        pz: p * d[2].max(0.0),
    }
}

/// Mean lifetime without adaptation: Haar average of `1 / p_fail` at a
/// random channel orientation and identity control. This is the
/// denominator of normalized lifetimes.
pub fn unital_baseline_lifetime(code: &AsymmetricCode, p: f64, ecc: Eccentricities, n_mc: u64, seed: u64) -> Result<McEstimate> {
    if !(p > 0.0 && p <= 0.5) || n_mc == 0 {
        return Err(Error::invalid("baseline needs p in (0, 1/2] and n_mc ≥ 1"));
    }
    let table = TripleTable::new(code);
    Ok(block_mean(n_mc, seed, |rng| {
        1.0 / table.p_fail(&identity_control_rates(p, ecc, rng))
    }))
}

/// As [`unital_baseline_lifetime`] with the leading-order failure rate.
pub fn haar_leading_order_lifetime(code: &AsymmetricCode, p: f64, ecc: Eccentricities, n_mc: u64, seed: u64) -> Result<McEstimate> {
    if !(p > 0.0 && p <= 0.5) || n_mc == 0 {
        return Err(Error::invalid("baseline needs p in (0, 1/2] and n_mc ≥ 1"));
    }
    Ok(block_mean(n_mc, seed, |rng| {
        1.0 / p_fail_leading(code, &identity_control_rates(p, ecc, rng))
    }))
}

/// `C(n, tz+1)`, the leading Z-failure multiplicity.
pub fn z_failure_multiplicity(code: &AsymmetricCode) -> f64 {
    binomial(code.n(), code.tz() + 1) as f64
}
