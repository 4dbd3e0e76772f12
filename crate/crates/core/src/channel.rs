//! Single-qubit noise channels at the Bloch-matrix / Pauli-rate level.
//!
//! An oriented Pauli channel has Bloch matrix `M = (1 − 2p) I + 2p A` with
//! `A = Qᵀ diag(k1, k2, k3) Q`. A control rotation `Q̂` applied to the
//! codespace and stabilizers turns the twirled per-qubit rates into
//! `p · diag(Q̂ A Q̂ᵀ)` in (x, y, z) order.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom3::{sym_eig, Mat3, Rotation3, SymMat3};

const SIMPLEX_TOL: f64 = 1e-12;

/// Normalized per-type error weights of a Pauli channel in its eigenbasis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eccentricities {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Eccentricities {
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        let ks = [k1, k2, k3];
        if ks.iter().any(|k| !k.is_finite() || *k < 0.0) {
            return Err(Error::invalid(format!(
                "eccentricities must be non-negative, got {ks:?}"
            )));
        }
        let sum = k1 + k2 + k3;
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::invalid(format!(
                "eccentricities must sum to 1, got {sum}"
            )));
        }
        Ok(Self { k1, k2, k3 })
    }

    /// Rescales non-negative weights onto the simplex.
    pub fn normalized(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        let sum = k1 + k2 + k3;
        if !(sum > 0.0) {
            return Err(Error::invalid("eccentricity weights sum to zero"));
        }
        Self::new(k1 / sum, k2 / sum, 1.0 - k1 / sum - k2 / sum)
    }

    pub fn isotropic() -> Self {
        Self {
            k1: 1.0 / 3.0,
            k2: 1.0 / 3.0,
            k3: 1.0 / 3.0,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.k1, self.k2, self.k3]
    }

    /// The same weights sorted in descending order.
    pub fn sorted_desc(&self) -> [f64; 3] {
        let mut k = self.as_array();
        k.sort_by(|a, b| b.total_cmp(a));
        k
    }
}

/// Per-qubit, per-cycle Pauli error probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliRates {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliRates {
    pub fn new(px: f64, py: f64, pz: f64) -> Result<Self> {
        let r = Self { px, py, pz };
        for v in [px, py, pz] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("rate {v} outside [0, 1]")));
            }
        }
        if r.total() > 1.0 + SIMPLEX_TOL {
            return Err(Error::invalid(format!(
                "total error rate {} exceeds 1",
                r.total()
            )));
        }
        Ok(r)
    }

    pub const fn zero() -> Self {
        Self {
            px: 0.0,
            py: 0.0,
            pz: 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.px + self.py + self.pz
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.px, self.py, self.pz]
    }
}

/// Pauli channel conjugated by an unknown basis rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedPauliChannel {
    p: f64,
    ecc: Eccentricities,
    orientation: Rotation3,
}

impl OrientedPauliChannel {
    pub fn new(p: f64, ecc: Eccentricities, orientation: Rotation3) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::invalid(format!(
                "oriented Pauli channel needs p in [0, 1/2], got {p}"
            )));
        }
        Ok(Self {
            p,
            ecc,
            orientation,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn ecc(&self) -> Eccentricities {
        self.ecc
    }

    pub fn orientation(&self) -> &Rotation3 {
        &self.orientation
    }

    /// The trace-one matrix `A = Qᵀ D Q`.
    pub fn error_matrix(&self) -> SymMat3 {
        oriented_matrix(self.ecc, &self.orientation)
    }

    pub fn bloch_matrix(&self) -> SymMat3 {
        pauli_bloch_matrix(self.p, self.ecc, &self.orientation)
    }
}

/// `Qᵀ diag(k) Q`.
pub fn oriented_matrix(ecc: Eccentricities, orientation: &Rotation3) -> SymMat3 {
    SymMat3::diag(ecc.as_array()).conjugate(&orientation.matrix().transpose())
}

/// `(1 − 2p) I + 2p Qᵀ diag(k) Q`, valid as a channel for any `p ∈ [0, 1]`.
pub fn pauli_bloch_matrix(p: f64, ecc: Eccentricities, orientation: &Rotation3) -> SymMat3 {
    SymMat3::identity().scale(1.0 - 2.0 * p) + oriented_matrix(ecc, orientation).scale(2.0 * p)
}

pub fn bloch_matrix(ch: &OrientedPauliChannel) -> SymMat3 {
    ch.bloch_matrix()
}

/// Twirled rates seen by a code whose stabilizers were counter-rotated by
/// `control`.
pub fn effective_rates(ch: &OrientedPauliChannel, control: &Rotation3) -> PauliRates {
    rates_from_error_matrix(ch.p, &ch.error_matrix(), control)
}

/// `p · diag(control · a · controlᵀ)`, clamped at zero against rounding.
pub fn rates_from_error_matrix(p: f64, a: &SymMat3, control: &Rotation3) -> PauliRates {
    let d = a.conjugate_diagonal(control.matrix());
    PauliRates {
        px: p * d[0].max(0.0),
        py: p * d[1].max(0.0),
        pz: p * d[2].max(0.0),
    }
}

/// Single-angle generalized dephasing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingChannel {
    p: f64,
    theta0: f64,
}

impl DephasingChannel {
    pub fn new(p: f64, theta0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("p must lie in [0, 1], got {p}")));
        }
        if !theta0.is_finite() {
            return Err(Error::invalid("theta0 must be finite"));
        }
        Ok(Self {
            p,
            theta0: wrap_angle(theta0),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn set_theta0(&mut self, theta0: f64) {
        self.theta0 = wrap_angle(theta0);
    }
}

/// Wraps an angle into `[0, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(PI);
    // rem_euclid can round up to exactly π for tiny negative inputs
    if w >= PI {
        0.0
    } else {
        w
    }
}

/// Distance between two angles on the circle of period π, in `[0, π/2]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(PI - d)
}

/// Twirled rates of the dephasing channel when the stabilizers are aligned
/// to `theta_hat`: `px = p cos²Δ`, `pz = p sin²Δ`, `Δ = θ₀ − θ̂`.
pub fn twirl_dephasing(ch: &DephasingChannel, theta_hat: f64) -> PauliRates {
    let s = (ch.theta0 - theta_hat).sin();
    let pz = ch.p * s * s;
    PauliRates {
        px: ch.p - pz,
        py: 0.0,
        pz,
    }
}

/// Counter-rotation that puts the largest eigenvalue of `a` on x, the
/// smallest on y and the middle one on z.
pub fn optimal_control(a_estimate: &SymMat3) -> Result<Rotation3> {
    let eig = sym_eig(a_estimate)?;
    let b = eig.basis;
    let (v1, v2, v3) = (b.row(0), b.row(1), b.row(2));
    let mut rows = [v1, v3, v2];
    if Mat3::from_rows(rows[0], rows[1], rows[2]).det() < 0.0 {
        rows[2] = -rows[2];
    }
    Ok(Rotation3::from_matrix_unchecked(Mat3::from_rows(
        rows[0], rows[1], rows[2],
    )))
}

/// Checks that `m` is the Bloch matrix of a unital qubit channel: all
/// singular values at most 1 and the Fujiwara–Algoet inequalities on the
/// (signed) principal values.
pub fn validate_unital(m: &Mat3) -> bool {
    const TOL: f64 = 1e-12;
    if !m.is_finite() {
        return false;
    }
    let lambdas = if m.is_symmetric(1e-14) {
        match sym_eig(&m.symmetric_part()) {
            Ok(e) => e.values,
            Err(_) => return false,
        }
    } else {
        let gram = (m.transpose() * *m).symmetric_part();
        let Ok(e) = sym_eig(&gram) else {
            return false;
        };
        let mut s = e.values.map(|v| v.max(0.0).sqrt());
        if m.det() < 0.0 {
            s[2] = -s[2];
        }
        s
    };
    if lambdas.iter().any(|l| l.abs() > 1.0 + TOL) {
        return false;
    }
    let [l1, l2, l3] = lambdas;
    1.0 + l3 + TOL >= (l1 + l2).abs()
        && 1.0 + l2 + TOL >= (l1 + l3).abs()
        && 1.0 + l1 + TOL >= (l2 + l3).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom3::haar_rotation;
    use crate::seed::trial_rng;
    use rand::Rng;

    fn ecc(k1: f64, k2: f64, k3: f64) -> Eccentricities {
        Eccentricities::new(k1, k2, k3).unwrap()
    }

    fn random_ecc<R: Rng>(rng: &mut R) -> Eccentricities {
        let x1: f64 = rng.random();
        let x2: f64 = rng.random::<f64>() * (1.0 - x1);
        ecc(x1, x2, 1.0 - x1 - x2)
    }

    #[test]
    fn bloch_matrix_examples() {
        let id = Rotation3::identity();
        let m = OrientedPauliChannel::new(0.0, ecc(0.7, 0.2, 0.1), id)
            .unwrap()
            .bloch_matrix();
        assert_eq!(m, SymMat3::identity());

        let m = OrientedPauliChannel::new(0.5, ecc(1.0, 0.0, 0.0), id)
            .unwrap()
            .bloch_matrix();
        assert_eq!(m, SymMat3::diag([1.0, 0.0, 0.0]));

        let m = OrientedPauliChannel::new(0.1, ecc(0.7, 0.2, 0.1), id)
            .unwrap()
            .bloch_matrix();
        let want = [0.94, 0.84, 0.82];
        for (a, b) in m.diagonal().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(m.off_diagonal_sq(), 0.0);
    }

    #[test]
    fn channel_rejects_large_p() {
        assert!(OrientedPauliChannel::new(0.6, ecc(1.0, 0.0, 0.0), Rotation3::identity()).is_err());
        assert!(DephasingChannel::new(0.9, 0.1).is_ok());
        assert!(Eccentricities::new(0.5, 0.5, 0.1).is_err());
        assert!(Eccentricities::new(1.1, -0.1, 0.0).is_err());
    }

    #[test]
    fn aligned_control_recovers_eigen_rates() {
        let mut rng = trial_rng(11);
        for _ in 0..200 {
            let q = haar_rotation(&mut rng);
            let e = random_ecc(&mut rng);
            let ch = OrientedPauliChannel::new(0.01, e, q).unwrap();
            let r = effective_rates(&ch, &q);
            assert!((r.px - 0.01 * e.k1).abs() < 1e-12);
            assert!((r.py - 0.01 * e.k2).abs() < 1e-12);
            assert!((r.pz - 0.01 * e.k3).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_rates_ignore_control() {
        let mut rng = trial_rng(12);
        let ch = OrientedPauliChannel::new(0.03, Eccentricities::isotropic(), haar_rotation(&mut rng))
            .unwrap();
        for _ in 0..50 {
            let r = effective_rates(&ch, &haar_rotation(&mut rng));
            for v in r.as_array() {
                assert!((v - 0.01).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rates_match_explicit_matrix_product() {
        let mut rng = trial_rng(13);
        for _ in 0..500 {
            let q = haar_rotation(&mut rng);
            let c = haar_rotation(&mut rng);
            let e = random_ecc(&mut rng);
            let p: f64 = rng.random::<f64>() * 0.5;
            let ch = OrientedPauliChannel::new(p, e, q).unwrap();
            let r = effective_rates(&ch, &c);
            // explicit Q̂ Qᵀ D Q Q̂ᵀ
            let full = *c.matrix() * q.matrix().transpose() * Mat3::diag(e.as_array()) * *q.matrix()
                * c.matrix().transpose();
            for i in 0..3 {
                assert!((r.as_array()[i] - p * full.m[i][i]).abs() <= 1e-12);
            }
            assert!((r.total() - p).abs() <= 1e-12);
            assert!(r.as_array().iter().all(|&v| (0.0..=p + 1e-15).contains(&v)));
        }
    }

    #[test]
    fn rates_are_covariant_under_right_multiplied_control() {
        let mut rng = trial_rng(14);
        for _ in 0..500 {
            let q = haar_rotation(&mut rng);
            let c = haar_rotation(&mut rng);
            let r = haar_rotation(&mut rng);
            let e = random_ecc(&mut rng);
            let ch = OrientedPauliChannel::new(0.2, e, q).unwrap();
            let ch2 = OrientedPauliChannel::new(0.2, e, q.compose(&r.transpose())).unwrap();
            let a = effective_rates(&ch, &c.compose(&r));
            let b = effective_rates(&ch2, &c);
            for (x, y) in a.as_array().iter().zip(b.as_array()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rates_ignore_eigenvector_assignment_for_equal_eccentricities() {
        let mut rng = trial_rng(15);
        for _ in 0..200 {
            let q = haar_rotation(&mut rng);
            let c = haar_rotation(&mut rng);
            // swap the two equal-weight axes: rotate by π/2 about the first one
            let swap = Rotation3::from_matrix(Mat3::new([
                [1.0, 0.0, 0.0],
                [0.0, 0.0, -1.0],
                [0.0, 1.0, 0.0],
            ]))
            .unwrap();
            let e = ecc(0.6, 0.2, 0.2);
            let a = effective_rates(&OrientedPauliChannel::new(0.1, e, q).unwrap(), &c);
            let b = effective_rates(
                &OrientedPauliChannel::new(0.1, e, swap.compose(&q)).unwrap(),
                &c,
            );
            let mut x = a.as_array();
            let mut y = b.as_array();
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            for (u, v) in x.iter().zip(y) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn twirl_examples() {
        let ch = DephasingChannel::new(0.01, 0.4).unwrap();
        let r = twirl_dephasing(&ch, 0.4);
        assert_eq!((r.px, r.py, r.pz), (0.01, 0.0, 0.0));

        let r = twirl_dephasing(&ch, 0.4 - PI / 2.0);
        assert!(r.px.abs() < 1e-17 && (r.pz - 0.01).abs() < 1e-17);

        let r = twirl_dephasing(&ch, 0.4 + PI / 4.0);
        assert!((r.px - 0.005).abs() < 1e-15 && (r.pz - 0.005).abs() < 1e-15);

        let a = twirl_dephasing(&ch, 1.1);
        let b = twirl_dephasing(&ch, 1.1 + PI);
        assert!((a.px - b.px).abs() < 1e-15 && (a.pz - b.pz).abs() < 1e-15);
        assert_eq!(a.px + a.pz, 0.01);
    }

    #[test]
    fn wrap_and_distance() {
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert!((wrap_angle(PI + 0.25) - 0.25).abs() < 1e-15);
        assert!((angle_distance(0.05, PI - 0.05) - 0.1).abs() < 1e-12);
        assert!((angle_distance(0.0, PI / 2.0) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn optimal_control_orders_x_then_z_then_y() {
        let a = SymMat3::diag([0.7, 0.2, 0.1]);
        let c = optimal_control(&a).unwrap();
        let d = a.conjugate(c.matrix());
        for (x, y) in d.diagonal().iter().zip([0.7, 0.1, 0.2]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((c.det() - 1.0).abs() < 1e-12);

        let iso = SymMat3::diag([1.0 / 3.0; 3]);
        let c = optimal_control(&iso).unwrap();
        assert!((c.det() - 1.0).abs() < 1e-12);

        let mut rng = trial_rng(16);
        for _ in 0..500 {
            let q = haar_rotation(&mut rng);
            let a = oriented_matrix(ecc(0.6, 0.3, 0.1), &q);
            let c = optimal_control(&a).unwrap();
            let d = a.conjugate(c.matrix());
            assert!(d.off_diagonal_sq().sqrt() <= 1e-9);
            for (x, y) in d.diagonal().iter().zip([0.6, 0.1, 0.3]) {
                assert!((x - y).abs() <= 1e-9);
            }
            assert!((c.det() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn unital_validation() {
        assert!(validate_unital(&Mat3::identity()));
        assert!(!validate_unital(&Mat3::diag([1.0, 1.0, -1.0])));
        assert!(!validate_unital(&Mat3::diag([1.2, 0.0, 0.0])));
        // transpose map: all singular values 1 but not completely positive
        assert!(!validate_unital(&Mat3::diag([1.0, -1.0, 1.0])));
        // a pure rotation is a valid unitary channel
        assert!(validate_unital(Rotation3::about_y(0.7).matrix()));
    }

    #[test]
    fn every_pauli_bloch_matrix_is_unital() {
        let mut rng = trial_rng(17);
        for _ in 0..10_000 {
            let p: f64 = rng.random();
            let e = random_ecc(&mut rng);
            let q = haar_rotation(&mut rng);
            let m = pauli_bloch_matrix(p, e, &q);
            assert!(validate_unital(&m.to_mat3()), "p={p} ecc={e:?}");
        }
    }
}
