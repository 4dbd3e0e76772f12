//! Random draws used by the trial engines.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::channel::PauliRates;
use crate::codes::{binomial, WeightTriple};

/// Probabilities below this are treated as zero by [`geometric`].
pub const MIN_RATE: f64 = 1e-300;

/// Counts of X, Y and Z errors on `n` qubits, each independently hit with
/// the given rates.
pub fn sample_syndrome<R: Rng + ?Sized>(rates: &PauliRates, n: u32, rng: &mut R) -> WeightTriple {
    let (cx, cy, cz) = (rates.px, rates.px + rates.py, rates.total());
    let mut t = WeightTriple::default();
    if cz <= 0.0 {
        return t;
    }
    for _ in 0..n {
        let u: f64 = rng.random();
        if u < cx {
            t.wx += 1;
        } else if u < cy {
            t.wy += 1;
        } else if u < cz {
            t.wz += 1;
        }
    }
    t
}

/// Number of Bernoulli(q) trials up to and including the first success.
///
/// Returns `None` when `q < MIN_RATE` or the draw overflows `u64`.
pub fn geometric<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Option<u64> {
    if q >= 1.0 {
        return Some(1);
    }
    if !(q >= MIN_RATE) {
        return None;
    }
    let u = 1.0 - rng.random::<f64>();
    let t = (u.ln() / (-q).ln_1p()).ceil();
    if !(t < u64::MAX as f64) {
        return None;
    }
    Some((t as u64).max(1))
}

/// `1 − (1 − q)^n` without cancellation.
pub fn prob_any(q: f64, n: u64) -> f64 {
    if q >= 1.0 {
        return if n > 0 { 1.0 } else { 0.0 };
    }
    -(n as f64 * (-q).ln_1p()).exp_m1()
}

fn ln_binomial_pmf(n: u32, k: u32, q: f64) -> f64 {
    let c = (binomial(n, k) as f64).ln();
    let a = if k == 0 { 0.0 } else { k as f64 * q.ln() };
    let b = if k == n { 0.0 } else { (n - k) as f64 * (-q).ln_1p() };
    c + a + b
}

/// `P(Bin(n, q) ≥ m)`, summed term by term from the upper end.
pub fn binomial_upper_tail(n: u32, q: f64, m: u32) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if m > n || q <= 0.0 {
        return 0.0;
    }
    if q >= 1.0 {
        return 1.0;
    }
    (m..=n).rev().map(|k| ln_binomial_pmf(n, k, q).exp()).sum::<f64>().min(1.0)
}

/// `Bin(n, q)` conditioned on a result of at least one.
pub fn truncated_binomial<R: Rng + ?Sized>(n: u32, q: f64, rng: &mut R) -> u32 {
    binomial_at_least(n, q, 1, rng)
}

/// `Bin(n, q)` conditioned on a result of at least `m ≥ 1`, by inversion.
pub fn binomial_at_least<R: Rng + ?Sized>(n: u32, q: f64, m: u32, rng: &mut R) -> u32 {
    debug_assert!(m >= 1 && m <= n && q > 0.0);
    if q >= 1.0 {
        return n;
    }
    let total = if m == 1 {
        prob_any(q, n as u64)
    } else {
        binomial_upper_tail(n, q, m)
    };
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = m;
    for k in m..=n {
        let pk = ln_binomial_pmf(n, k, q).exp();
        if pk > 0.0 {
            last = k;
        }
        acc += pk;
        if acc > target {
            return k;
        }
    }
    last
}

/// `Bin(n, q)` for counts up to `u64`.
pub fn binomial_u64<R: Rng + ?Sized>(n: u64, q: f64, rng: &mut R) -> u64 {
    if n == 0 || q <= 0.0 {
        return 0;
    }
    if q >= 1.0 {
        return n;
    }
    Binomial::new(n, q).expect("probability checked above").sample(rng)
}

/// One error cycle conditioned on at least one faulty qubit: the total
/// weight is drawn from a truncated binomial, then split by type.
pub fn sample_error_cycle<R: Rng + ?Sized>(rates: &PauliRates, n: u32, rng: &mut R) -> WeightTriple {
    let p = rates.total();
    let w = truncated_binomial(n, p, rng);
    let (cx, cy) = (rates.px / p, (rates.px + rates.py) / p);
    let mut t = WeightTriple::default();
    for _ in 0..w {
        let u: f64 = rng.random();
        if u < cx {
            t.wx += 1;
        } else if u < cy {
            t.wy += 1;
        } else {
            t.wz += 1;
        }
    }
    t
}
