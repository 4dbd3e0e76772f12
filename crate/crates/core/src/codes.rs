//! Asymmetric stabilizer codes and their uncorrectable-error rates.
//!
//! A code is reduced to its weight budget: X-type support `wx + wy` must
//! stay within `tx` and Z-type support `wz + wy` within `tz`. No generators
//! are stored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::PauliRates;
use crate::error::{Error, Result};

/// Largest block length supported by the exact integer combinatorics.
pub const MAX_N: u32 = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AsymmetricCode {
    n: u32,
    k: u32,
    dx: u32,
    dz: u32,
}

impl AsymmetricCode {
    pub fn new(n: u32, k: u32, dx: u32, dz: u32) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::invalid(format!("n must be in 1..={MAX_N}, got {n}")));
        }
        if k == 0 || k > n {
            return Err(Error::invalid(format!("k must be in 1..=n, got {k}")));
        }
        if !(1 <= dz && dz <= dx && dx <= n) {
            return Err(Error::invalid(format!(
                "need 1 <= dz <= dx <= n, got dx={dx} dz={dz} n={n}"
            )));
        }
        Ok(Self { n, k, dx, dz })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dx(&self) -> u32 {
        self.dx
    }

    pub fn dz(&self) -> u32 {
        self.dz
    }

    pub fn tx(&self) -> u32 {
        (self.dx - 1) / 2
    }

    pub fn tz(&self) -> u32 {
        (self.dz - 1) / 2
    }

    /// Catalog name, e.g. `15-1-7-3` or `23-1-7` for a symmetric code.
    pub fn name(&self) -> String {
        if self.dx == self.dz {
            format!("{}-{}-{}", self.n, self.k, self.dx)
        } else {
            format!("{}-{}-{}-{}", self.n, self.k, self.dx, self.dz)
        }
    }

    pub fn correctable(&self, t: WeightTriple) -> bool {
        correctable(self, t)
    }
}

impl fmt::Display for AsymmetricCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dx == self.dz {
            write!(f, "[[{}, {}, {}]]", self.n, self.k, self.dx)
        } else {
            write!(f, "[[{}, {}, {}/{}]]", self.n, self.k, self.dx, self.dz)
        }
    }
}

impl FromStr for AsymmetricCode {
    type Err = Error;

    /// Accepts catalog names as well as any `n-k-d` / `n-k-dx-dz` string.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(c) = lookup(s) {
            return Ok(c);
        }
        let parts: Vec<u32> = s
            .split('-')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::UnknownCode(s.to_string()))?;
        match parts.as_slice() {
            [n, k, d] => AsymmetricCode::new(*n, *k, *d, *d),
            [n, k, dx, dz] => AsymmetricCode::new(*n, *k, *dx, *dz),
            _ => Err(Error::UnknownCode(s.to_string())),
        }
    }
}

/// Reference codes: `[[15,1,7/3]]` shortened Reed–Muller, `[[31,6,7/5]]`
/// BCH-based, `[[23,1,7]]` Golay and the toy `[[5,1,3]]`.
pub fn catalog() -> Vec<(&'static str, AsymmetricCode)> {
    vec![
        ("15-1-7-3", AsymmetricCode { n: 15, k: 1, dx: 7, dz: 3 }),
        ("31-6-7-5", AsymmetricCode { n: 31, k: 6, dx: 7, dz: 5 }),
        ("23-1-7", AsymmetricCode { n: 23, k: 1, dx: 7, dz: 7 }),
        ("5-1-3", AsymmetricCode { n: 5, k: 1, dx: 3, dz: 3 }),
    ]
}

/// Looks up a catalog code by name.
pub fn lookup(name: &str) -> Option<AsymmetricCode> {
    catalog()
        .into_iter()
        .find(|(n, _)| *n == name.trim())
        .map(|(_, c)| c)
}

pub fn code_by_name(name: &str) -> Result<AsymmetricCode> {
    lookup(name).ok_or_else(|| Error::UnknownCode(name.to_string()))
}

/// Numbers of X, Y and Z errors in one correction cycle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightTriple {
    pub wx: u32,
    pub wy: u32,
    pub wz: u32,
}

impl WeightTriple {
    pub const fn new(wx: u32, wy: u32, wz: u32) -> Self {
        Self { wx, wy, wz }
    }

    pub fn weight(&self) -> u32 {
        self.wx + self.wy + self.wz
    }

    pub fn is_zero(&self) -> bool {
        self.weight() == 0
    }
}

pub fn correctable(code: &AsymmetricCode, t: WeightTriple) -> bool {
    t.wx + t.wy <= code.tx() && t.wz + t.wy <= code.tz()
}

/// Exact `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Exact `n! / ((n − w)! wx! wy! wz!)`.
pub fn multinomial(n: u32, wx: u32, wy: u32, wz: u32) -> Result<u128> {
    let w = wx
        .checked_add(wy)
        .and_then(|s| s.checked_add(wz))
        .ok_or_else(|| Error::invalid("weight overflow"))?;
    if w > n {
        return Err(Error::invalid(format!(
            "weights ({wx}, {wy}, {wz}) exceed block length {n}"
        )));
    }
    if n > MAX_N {
        return Err(Error::invalid(format!("n = {n} exceeds {MAX_N}")));
    }
    // C(n, w) C(w, wx) C(w − wx, wy); each factor is below 2^60 and the
    // product below 3^63 < 2^101
    let out = binomial(n, w)
        .checked_mul(binomial(w, wx))
        .and_then(|v| v.checked_mul(binomial(w - wx, wy)))
        .ok_or_else(|| Error::Numerical("multinomial overflow".into()))?;
    Ok(out)
}

/// `[C(k, j)]` for `k ≤ n` as floats.
fn pascal(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut row = vec![1.0; k + 1];
        for j in 1..k {
            row[j] = rows[k - 1][j - 1] + rows[k - 1][j];
        }
        rows.push(row);
    }
    rows
}

fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        out.push(acc);
        acc *= x;
    }
    out
}

/// Compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Probability of each triple class, enumerated once per code so the hot
/// loops only multiply precomputed powers.
#[derive(Clone, Debug)]
pub struct TripleTable {
    n: u32,
    correctable: Vec<(WeightTriple, f64)>,
    uncorrectable: Vec<(WeightTriple, f64)>,
}

impl TripleTable {
    pub fn new(code: &AsymmetricCode) -> Self {
        let n = code.n;
        let c = pascal(n as usize);
        let mut correctable_set = Vec::new();
        let mut uncorrectable = Vec::new();
        for w in 0..=n {
            for wx in 0..=w {
                for wy in 0..=(w - wx) {
                    let wz = w - wx - wy;
                    let t = WeightTriple::new(wx, wy, wz);
                    let coef = c[n as usize][w as usize]
                        * c[w as usize][wx as usize]
                        * c[(w - wx) as usize][wy as usize];
                    if correctable(code, t) {
                        correctable_set.push((t, coef));
                    } else {
                        uncorrectable.push((t, coef));
                    }
                }
            }
        }
        Self {
            n,
            correctable: correctable_set,
            uncorrectable,
        }
    }

    fn sum(&self, terms: &[(WeightTriple, f64)], rates: &PauliRates) -> f64 {
        let n = self.n as usize;
        let px = powers(rates.px, n);
        let py = powers(rates.py, n);
        let pz = powers(rates.pz, n);
        let q = powers((1.0 - rates.total()).max(0.0), n);
        let mut acc = Kahan::default();
        for (t, coef) in terms {
            let term = coef
                * px[t.wx as usize]
                * py[t.wy as usize]
                * pz[t.wz as usize]
                * q[n - t.weight() as usize];
            acc.add(term);
        }
        acc.sum
    }

    /// Probability that a cycle's errors are uncorrectable.
    pub fn p_fail(&self, rates: &PauliRates) -> f64 {
        self.sum(&self.uncorrectable, rates).clamp(0.0, 1.0)
    }

    /// Probability that a cycle's errors are correctable.
    pub fn p_success(&self, rates: &PauliRates) -> f64 {
        self.sum(&self.correctable, rates).clamp(0.0, 1.0)
    }

    pub fn correctable_triples(&self) -> impl Iterator<Item = WeightTriple> + '_ {
        self.correctable.iter().map(|(t, _)| *t)
    }
}

/// Exact per-cycle uncorrectable error probability.
///
/// Summed directly over the violating triples; every term is non-negative,
/// so the result keeps full relative precision even when it is far below
/// machine epsilon.
pub fn p_fail_exact(code: &AsymmetricCode, rates: &PauliRates) -> f64 {
    TripleTable::new(code).p_fail(rates)
}

/// Leading-order failure rate from the lightest uncorrectable Z-type and
/// X-type errors.
pub fn p_fail_leading(code: &AsymmetricCode, rates: &PauliRates) -> f64 {
    let tz = code.tz() + 1;
    let tx = code.tx() + 1;
    binomial(code.n, tz) as f64 * (rates.py + rates.pz).powi(tz as i32)
        + binomial(code.n, tx) as f64 * (rates.px + rates.py).powi(tx as i32)
}
