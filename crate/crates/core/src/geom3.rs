//! Fixed-size 3×3 real linear algebra in the Bloch-matrix picture.
//!
//! Everything here is a small `Copy` value type. Rotations act on Bloch
//! vectors; a control rotation `Q̂` conjugates a channel matrix as
//! `Q̂ A Q̂ᵀ`, so its *rows* are the axes that get mapped onto x, y and z.

use std::f64::consts::PI;
use std::ops::{Add, Index, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Off-diagonal convergence threshold for the Jacobi sweeps, relative to the
/// Frobenius norm of the input.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Outer product `v vᵀ`.
    pub fn outer(self) -> SymMat3 {
        SymMat3 {
            xx: self.x * self.x,
            xy: self.x * self.y,
            xz: self.x * self.z,
            yy: self.y * self.y,
            yz: self.y * self.z,
            zz: self.z * self.z,
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Dense 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const fn new(m: [[f64; 3]; 3]) -> Self {
        Self { m }
    }

    pub const fn zero() -> Self {
        Self { m: [[0.0; 3]; 3] }
    }

    pub const fn identity() -> Self {
        Self {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn diag(d: [f64; 3]) -> Self {
        Self {
            m: [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]],
        }
    }

    /// Builds a matrix from 9 row-major entries.
    pub fn from_row_major(v: &[f64]) -> Result<Self> {
        if v.len() != 9 {
            return Err(Error::invalid(format!(
                "expected 9 matrix entries, got {}",
                v.len()
            )));
        }
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row.copy_from_slice(&v[3 * i..3 * i + 3]);
        }
        Ok(Self { m })
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for i in 0..3 {
            out[3 * i..3 * i + 3].copy_from_slice(&self.m[i]);
        }
        out
    }

    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Self {
        Self::new([r0.to_array(), r1.to_array(), r2.to_array()])
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::from_array(self.m[i])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn transpose(&self) -> Mat3 {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[j][i];
            }
        }
        Mat3::new(t)
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// Symmetric part `(M + Mᵀ)/2`.
    pub fn symmetric_part(&self) -> SymMat3 {
        let m = &self.m;
        SymMat3 {
            xx: m[0][0],
            xy: 0.5 * (m[0][1] + m[1][0]),
            xz: 0.5 * (m[0][2] + m[2][0]),
            yy: m[1][1],
            yz: 0.5 * (m[1][2] + m[2][1]),
            zz: m[2][2],
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.m[0][1] - self.m[1][0]).abs() <= tol
            && (self.m[0][2] - self.m[2][0]).abs() <= tol
            && (self.m[1][2] - self.m[2][1]).abs() <= tol
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.m[i][j]
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        Mat3::new(out)
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] += o.m[i][j];
            }
        }
        out
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] -= o.m[i][j];
            }
        }
        out
    }
}

/// Symmetric 3×3 matrix stored as its upper triangle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymMat3 {
    pub xx: f64,
    pub xy: f64,
    pub xz: f64,
    pub yy: f64,
    pub yz: f64,
    pub zz: f64,
}

impl SymMat3 {
    pub const fn new(xx: f64, xy: f64, xz: f64, yy: f64, yz: f64, zz: f64) -> Self {
        Self {
            xx,
            xy,
            xz,
            yy,
            yz,
            zz,
        }
    }

    pub const fn diag(d: [f64; 3]) -> Self {
        Self::new(d[0], 0.0, 0.0, d[1], 0.0, d[2])
    }

    pub fn identity() -> Self {
        Self::diag([1.0; 3])
    }

    pub fn to_mat3(&self) -> Mat3 {
        Mat3::new([
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn diagonal(&self) -> [f64; 3] {
        [self.xx, self.yy, self.zz]
    }

    pub fn scale(&self, s: f64) -> SymMat3 {
        SymMat3::new(
            self.xx * s,
            self.xy * s,
            self.xz * s,
            self.yy * s,
            self.yz * s,
            self.zz * s,
        )
    }

    /// Quadratic form `vᵀ S v`.
    pub fn quad(&self, v: Vec3) -> f64 {
        self.xx * v.x * v.x
            + self.yy * v.y * v.y
            + self.zz * v.z * v.z
            + 2.0 * (self.xy * v.x * v.y + self.xz * v.x * v.z + self.yz * v.y * v.z)
    }

    /// Sum of squares of the off-diagonal entries (both triangles).
    pub fn off_diagonal_sq(&self) -> f64 {
        2.0 * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz)
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.xx * self.xx + self.yy * self.yy + self.zz * self.zz + self.off_diagonal_sq()).sqrt()
    }

    /// `R S Rᵀ`, which is again symmetric.
    pub fn conjugate(&self, r: &Mat3) -> SymMat3 {
        (*r * self.to_mat3() * r.transpose()).symmetric_part()
    }

    /// Diagonal of `R S Rᵀ` without forming the full product.
    pub fn conjugate_diagonal(&self, r: &Mat3) -> [f64; 3] {
        [self.quad(r.row(0)), self.quad(r.row(1)), self.quad(r.row(2))]
    }

    pub fn is_finite(&self) -> bool {
        [self.xx, self.xy, self.xz, self.yy, self.yz, self.zz]
            .iter()
            .all(|v| v.is_finite())
    }
}

impl Add for SymMat3 {
    type Output = SymMat3;
    fn add(self, o: SymMat3) -> SymMat3 {
        SymMat3::new(
            self.xx + o.xx,
            self.xy + o.xy,
            self.xz + o.xz,
            self.yy + o.yy,
            self.yz + o.yz,
            self.zz + o.zz,
        )
    }
}

impl Sub for SymMat3 {
    type Output = SymMat3;
    fn sub(self, o: SymMat3) -> SymMat3 {
        SymMat3::new(
            self.xx - o.xx,
            self.xy - o.xy,
            self.xz - o.xz,
            self.yy - o.yy,
            self.yz - o.yz,
            self.zz - o.zz,
        )
    }
}

/// Proper rotation in SO(3).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Mat3", into = "Mat3")]
pub struct Rotation3(Mat3);

impl Rotation3 {
    /// Tolerance used when validating user-supplied matrices.
    pub const VALIDATION_TOL: f64 = 1e-10;

    pub const fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Validates orthonormality and a positive determinant.
    pub fn from_matrix(m: Mat3) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::invalid("rotation has non-finite entries"));
        }
        let err = (m.transpose() * m - Mat3::identity()).frobenius_norm();
        if err > Self::VALIDATION_TOL {
            return Err(Error::invalid(format!(
                "matrix is not orthogonal (‖QᵀQ − I‖ = {err:e})"
            )));
        }
        if (m.det() - 1.0).abs() > Self::VALIDATION_TOL {
            return Err(Error::invalid(format!(
                "rotation must have determinant +1, got {}",
                m.det()
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Result<Self> {
        Self::from_matrix(Mat3::from_rows(r0, r1, r2))
    }

    /// Rotation from a (not necessarily normalized) quaternion `(w, x, y, z)`.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        let (w, x, y, z) = (w / n, x / n, y / n, z / n);
        Self(Mat3::new([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]))
    }

    /// Rotation by `angle` about the y axis; maps the z axis towards x.
    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Mat3::new([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Rotation3 {
        Self(self.0.transpose())
    }

    pub fn compose(&self, other: &Rotation3) -> Rotation3 {
        Self(self.0 * other.0)
    }

    pub fn row(&self, i: usize) -> Vec3 {
        self.0.row(i)
    }

    pub fn col(&self, j: usize) -> Vec3 {
        self.0.col(j)
    }

    pub fn det(&self) -> f64 {
        self.0.det()
    }
}

impl Default for Rotation3 {
    fn default() -> Self {
        Self::identity()
    }
}

impl TryFrom<Mat3> for Rotation3 {
    type Error = Error;
    fn try_from(m: Mat3) -> Result<Self> {
        Self::from_matrix(m)
    }
}

impl From<Rotation3> for Mat3 {
    fn from(r: Rotation3) -> Mat3 {
        r.0
    }
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Clone, Copy, Debug)]
pub struct SymEig {
    /// Eigenvalues in descending order.
    pub values: [f64; 3],
    /// Rows are the matching unit eigenvectors, so `basis · m · basisᵀ` is
    /// diagonal.
    pub basis: Rotation3,
}

/// Cyclic Jacobi eigendecomposition.
pub fn sym_eig(m: &SymMat3) -> Result<SymEig> {
    if !m.is_finite() {
        return Err(Error::Numerical("non-finite matrix passed to sym_eig".into()));
    }
    let mut a = m.to_mat3().m;
    // columns of v are eigenvectors
    let mut v = Mat3::identity().m;
    let scale = m.frobenius_norm();
    let tol = JACOBI_TOL * scale.max(f64::MIN_POSITIVE);

    let off = |a: &[[f64; 3]; 3]| (2.0 * (a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2))).sqrt();

    let mut converged = off(&a) <= tol;
    let mut sweep = 0;
    while !converged && sweep < JACOBI_MAX_SWEEPS {
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A ← Jᵀ A J with J the Givens rotation in the (p, q) plane
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
        sweep += 1;
        converged = off(&a) <= tol;
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge after {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    // stable sort keeps input order among ties
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = [a[order[0]][order[0]], a[order[1]][order[1]], a[order[2]][order[2]]];
    let vmat = Mat3::new(v);
    let mut rows = [vmat.col(order[0]), vmat.col(order[1]), vmat.col(order[2])];
    if Mat3::from_rows(rows[0], rows[1], rows[2]).det() < 0.0 {
        rows[2] = -rows[2];
    }
    Ok(SymEig {
        values,
        basis: Rotation3::from_matrix_unchecked(Mat3::from_rows(rows[0], rows[1], rows[2])),
    })
}

/// Haar-random rotation via a uniformly random unit quaternion.
pub fn haar_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    loop {
        let w: f64 = rng.sample(StandardNormal);
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if w * w + x * x + y * y + z * z > 1e-12 {
            return Rotation3::from_quaternion(w, x, y, z);
        }
    }
}

/// Uniform point on the unit sphere from `u ~ U[-1, 1]`, `v ~ U[0, 1)`.
pub fn sphere_uniform<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let u: f64 = rng.random_range(-1.0..=1.0);
    let v: f64 = rng.random();
    let r = (1.0 - u * u).max(0.0).sqrt();
    let (s, c) = (2.0 * PI * v).sin_cos();
    Vec3::new(u, r * s, r * c)
}

pub fn frobenius_distance(a: &Mat3, b: &Mat3) -> f64 {
    (*a - *b).frobenius_norm()
}

pub fn sym_frobenius_distance(a: &SymMat3, b: &SymMat3) -> f64 {
    (*a - *b).frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Roots of the characteristic polynomial of a symmetric 3×3 matrix via
    /// the trigonometric formula, descending.
    fn char_poly_roots(m: &SymMat3) -> [f64; 3] {
        let p1 = m.xy.powi(2) + m.xz.powi(2) + m.yz.powi(2);
        let q = m.trace() / 3.0;
        let p2 = (m.xx - q).powi(2) + (m.yy - q).powi(2) + (m.zz - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        if p == 0.0 {
            return [q; 3];
        }
        let b = (m.to_mat3() - Mat3::identity().scale(q)).scale(1.0 / p);
        let r = (b.det() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
        [e1, 3.0 * q - e1 - e3, e3]
    }

    fn reconstruct(e: &SymEig) -> Mat3 {
        let b = *e.basis.matrix();
        b.transpose() * Mat3::diag(e.values) * b
    }

    #[test]
    fn eig_of_scaled_identity() {
        let e = sym_eig(&SymMat3::diag([1.0 / 3.0; 3])).unwrap();
        for v in e.values {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((e.basis.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_of_diagonal() {
        let e = sym_eig(&SymMat3::diag([0.2, 0.7, 0.1])).unwrap();
        assert_eq!(e.values, [0.7, 0.2, 0.1]);
        let b = e.basis.matrix();
        assert!((b.m[0][1].abs() - 1.0).abs() < 1e-15);
        assert!((b.m[1][0].abs() - 1.0).abs() < 1e-15);
        assert!((b.m[2][2].abs() - 1.0).abs() < 1e-15);
        assert!((e.basis.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_conjugation() {
        let mut r = rng(1);
        for _ in 0..1000 {
            let q = haar_rotation(&mut r);
            let m = SymMat3::diag([0.5, 0.3, 0.2]).conjugate(&q.transpose().0);
            let e = sym_eig(&m).unwrap();
            assert!(frobenius_distance(&reconstruct(&e), &m.to_mat3()) <= 1e-10);
            let d = m.conjugate(e.basis.matrix());
            assert!(d.off_diagonal_sq().sqrt() <= 1e-10);
            assert!((e.basis.det() - 1.0).abs() < 1e-10);
            for (a, b) in e.values.iter().zip([0.5, 0.3, 0.2]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eig_matches_characteristic_polynomial() {
        let mut r = rng(2);
        for _ in 0..2000 {
            let mut v = [0.0; 6];
            for x in v.iter_mut() {
                *x = r.random_range(-2.0..2.0);
            }
            let m = SymMat3::new(v[0], v[1], v[2], v[3], v[4], v[5]);
            let e = sym_eig(&m).unwrap();
            let roots = char_poly_roots(&m);
            for (a, b) in e.values.iter().zip(roots) {
                assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", e.values, roots);
            }
            assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
        }
    }

    #[test]
    fn eig_rejects_nan() {
        let m = SymMat3::diag([f64::NAN, 0.0, 0.0]);
        assert!(matches!(sym_eig(&m), Err(Error::Numerical(_))));
    }

    #[test]
    fn haar_samples_are_proper_rotations() {
        let mut r = rng(3);
        for _ in 0..10_000 {
            let q = haar_rotation(&mut r);
            let m = q.matrix();
            assert!((m.transpose() * *m - Mat3::identity()).frobenius_norm() <= 1e-12);
            assert!((m.det() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn sphere_points_are_unit_and_centered() {
        let mut r = rng(4);
        let n = 100_000;
        let mut mean = Vec3::default();
        for _ in 0..n {
            let v = sphere_uniform(&mut r);
            assert!((v.norm() - 1.0).abs() <= 1e-12);
            mean = mean + v;
        }
        let mean = mean.scale(1.0 / n as f64);
        assert!(mean.x.abs() < 0.01 && mean.y.abs() < 0.01 && mean.z.abs() < 0.01);
    }

    #[test]
    fn frobenius_distance_cases() {
        let m = Mat3::new([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.5]]);
        assert_eq!(frobenius_distance(&m, &m), 0.0);
        assert!((frobenius_distance(&Mat3::identity(), &Mat3::zero()) - 3f64.sqrt()).abs() < 1e-15);

        let mut r = rng(5);
        for _ in 0..100 {
            let mut a = Mat3::zero();
            let mut b = Mat3::zero();
            for i in 0..3 {
                for j in 0..3 {
                    a.m[i][j] = r.random_range(-1.0..1.0);
                    b.m[i][j] = r.random_range(-1.0..1.0);
                }
            }
            let mut ss = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    ss += (a.m[i][j] - b.m[i][j]).powi(2);
                }
            }
            assert!((frobenius_distance(&a, &b) - ss.sqrt()).abs() <= 1e-14);
            assert_eq!(frobenius_distance(&a, &b), frobenius_distance(&b, &a));
        }
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation3::from_matrix(Mat3::diag([1.0, 1.0, -1.0])).is_err());
        assert!(Rotation3::from_matrix(Mat3::diag([1.0, 2.0, 0.5])).is_err());
        assert!(Rotation3::from_matrix(*Rotation3::about_y(0.3).matrix()).is_ok());
    }
}
