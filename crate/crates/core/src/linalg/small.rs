//! Fixed-size 2x2 linear algebra.
//!
//! Every matrix in the analysis layer is 2x2, so closed forms replace general
//! decompositions. Symmetric matrices store three entries; general matrices
//! are row-major.

use serde::{Deserialize, Serialize};

pub type Vec2 = [f64; 2];

/// Entries of magnitude at or below this (relative to the vector norm) do not
/// count as "nonzero" when fixing eigenvector signs.
const SIGN_TOL: f64 = 1e-12;

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

pub fn scale(a: Vec2, s: f64) -> Vec2 {
    [a[0] * s, a[1] * s]
}

pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

/// Flip `v` so that its first nonzero entry is positive.
pub fn canonical_sign(v: Vec2) -> Vec2 {
    let tol = SIGN_TOL * norm(v);
    let lead = if v[0].abs() > tol { v[0] } else { v[1] };
    if lead < 0.0 {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// General 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);

    pub fn from_cols(c0: Vec2, c1: Vec2) -> Self {
        Mat2([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub fn diag(d: Vec2) -> Self {
        Mat2([[d[0], 0.0], [0.0, d[1]]])
    }

    pub fn col(&self, j: usize) -> Vec2 {
        [self.0[0][j], self.0[1][j]]
    }

    pub fn row(&self, i: usize) -> Vec2 {
        self.0[i]
    }

    pub fn transpose(&self) -> Self {
        let m = self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn mul(&self, other: &Mat2) -> Self {
        let (a, b) = (self.0, other.0);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        [dot(self.0[0], v), dot(self.0[1], v)]
    }

    pub fn add(&self, other: &Mat2) -> Self {
        let (a, b) = (self.0, other.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn sub(&self, other: &Mat2) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let a = self.0;
        Mat2([[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]])
    }

    pub fn det(&self) -> f64 {
        let a = self.0;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let a = self.0;
        Some(Mat2([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]))
    }

    /// Solve `self * x = b` by Cramer's rule.
    pub fn solve(&self, b: Vec2) -> Option<Vec2> {
        self.inverse().map(|inv| inv.mul_vec(b))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|x| *x == 0.0)
    }

    /// `exp(t * self)` in closed form.
    pub fn exp_scaled(&self, t: f64) -> Mat2 {
        let s = 0.5 * self.trace();
        let shifted = self.sub(&Mat2::IDENTITY.scaled(s));
        // shifted^2 = q2 * I by Cayley-Hamilton
        let q2 = s * s - self.det();
        let (c, sh) = if q2 > 0.0 {
            let q = q2.sqrt();
            ((q * t).cosh(), if q * t == 0.0 { t } else { (q * t).sinh() / q })
        } else if q2 < 0.0 {
            let q = (-q2).sqrt();
            ((q * t).cos(), if q * t == 0.0 { t } else { (q * t).sin() / q })
        } else {
            (1.0, t)
        };
        Mat2::IDENTITY
            .scaled(c)
            .add(&shifted.scaled(sh))
            .scaled((s * t).exp())
    }
}

/// Symmetric 2x2 matrix; symmetry is structural.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMat2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

/// Eigen-decomposition of a symmetric 2x2 matrix.
///
/// Eigenvalues are sorted in descending order; column `k` of `vectors` is the
/// unit eigenvector of `values[k]` with its first nonzero entry positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen {
    pub values: Vec2,
    pub vectors: Mat2,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> Vec2 {
        self.vectors.col(k)
    }

    /// `Q diag(g(lambda)) Q^T` for a scalar map `g` applied to the eigenvalues.
    pub fn recompose(&self, g: impl Fn(f64) -> f64) -> SymMat2 {
        let q = self.vectors;
        let d = Mat2::diag([g(self.values[0]), g(self.values[1])]);
        SymMat2::from_mat2(&q.mul(&d).mul(&q.transpose()))
    }
}

impl SymMat2 {
    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        SymMat2 { a11, a12, a22 }
    }

    pub const fn identity() -> Self {
        SymMat2::new(1.0, 0.0, 1.0)
    }

    pub const fn zero() -> Self {
        SymMat2::new(0.0, 0.0, 0.0)
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        SymMat2::new(a, 0.0, b)
    }

    /// Symmetric part of `m`; exact for symmetric input.
    pub fn from_mat2(m: &Mat2) -> Self {
        SymMat2::new(m.0[0][0], 0.5 * (m.0[0][1] + m.0[1][0]), m.0[1][1])
    }

    pub fn to_mat2(&self) -> Mat2 {
        Mat2([[self.a11, self.a12], [self.a12, self.a22]])
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        self.to_mat2().0
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        self.to_mat2().mul_vec(v)
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymMat2::new(self.a11 * s, self.a12 * s, self.a22 * s)
    }

    pub fn add(&self, o: &SymMat2) -> Self {
        SymMat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a22 + o.a22)
    }

    pub fn sub(&self, o: &SymMat2) -> Self {
        SymMat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a22 - o.a22)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.a11 * self.a11 + 2.0 * self.a12 * self.a12 + self.a22 * self.a22).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.a11 == 0.0 && self.a12 == 0.0 && self.a22 == 0.0
    }

    /// True when the matrix is a multiple of the identity up to `rel_tol`.
    pub fn is_scalar(&self, rel_tol: f64) -> bool {
        let scale = self.norm();
        (self.a11 - self.a22).abs() <= rel_tol * scale && self.a12.abs() <= rel_tol * scale
    }

    pub fn eigen(&self) -> SymEigen {
        let m = 0.5 * (self.a11 + self.a22);
        let d = 0.5 * (self.a11 - self.a22);
        let r = d.hypot(self.a12);
        let values = [m + r, m - r];
        if r == 0.0 {
            return SymEigen {
                values,
                vectors: Mat2::IDENTITY,
            };
        }
        // pick the better-conditioned of the two null-vector formulas
        let v = if d >= 0.0 {
            [d + r, self.a12]
        } else {
            [self.a12, r - d]
        };
        let v = canonical_sign(scale(v, 1.0 / norm(v)));
        let w = canonical_sign([-v[1], v[0]]);
        SymEigen {
            values,
            vectors: Mat2::from_cols(v, w),
        }
    }

    /// Positive and negative spectral parts, `A = A+ + A-`.
    pub fn spectral_parts(&self) -> (SymMat2, SymMat2) {
        let e = self.eigen();
        (e.recompose(|x| x.max(0.0)), e.recompose(|x| x.min(0.0)))
    }

    /// Commutator `self * other - other * self`.
    pub fn commutator(&self, other: &SymMat2) -> Mat2 {
        let (a, b) = (self.to_mat2(), other.to_mat2());
        a.mul(&b).sub(&b.mul(&a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_reflection_matrix_matches_hand_values() {
        let e = SymMat2::new(3.0, 4.0, -3.0).eigen();
        assert!((e.values[0] - 5.0).abs() < 1e-14);
        assert!((e.values[1] + 5.0).abs() < 1e-14);
        let s5 = 5f64.sqrt();
        let v = e.vector(0);
        let w = e.vector(1);
        assert!((v[0] - 2.0 / s5).abs() < 1e-15 && (v[1] - 1.0 / s5).abs() < 1e-15);
        assert!((w[0] - 1.0 / s5).abs() < 1e-15 && (w[1] + 2.0 / s5).abs() < 1e-15);
    }

    #[test]
    fn eigen_of_multiple_of_identity_is_standard_basis() {
        let e = SymMat2::diag(2.0, 2.0).eigen();
        assert_eq!(e.values, [2.0, 2.0]);
        assert_eq!(e.vectors, Mat2::IDENTITY);
    }

    #[test]
    fn eigen_orders_diagonal_entries_descending() {
        let e = SymMat2::diag(-1.0, 4.0).eigen();
        assert_eq!(e.values, [4.0, -1.0]);
        assert_eq!(e.vector(0), [0.0, 1.0]);
        assert_eq!(e.vector(1), [1.0, 0.0]);
    }

    #[test]
    fn exp_matches_diagonal_and_nilpotent_cases() {
        let d = Mat2::diag([1.0, -2.0]).exp_scaled(0.5);
        assert!((d.0[0][0] - 0.5f64.exp()).abs() < 1e-15);
        assert!((d.0[1][1] - (-1.0f64).exp()).abs() < 1e-15);
        let n = Mat2([[0.0, 1.0], [0.0, 0.0]]).exp_scaled(3.0);
        assert_eq!(n, Mat2([[1.0, 3.0], [0.0, 1.0]]));
        // rotation generator
        let r = Mat2([[0.0, -1.0], [1.0, 0.0]]).exp_scaled(std::f64::consts::FRAC_PI_2);
        assert!((r.0[1][0] - 1.0).abs() < 1e-15 && r.0[0][0].abs() < 1e-15);
    }

    #[test]
    fn spectral_parts_sum_back() {
        let a = SymMat2::new(0.0, 1.0, 0.0);
        let (p, m) = a.spectral_parts();
        assert!((p.a11 - 0.5).abs() < 1e-15 && (p.a12 - 0.5).abs() < 1e-15);
        assert!((m.a11 + 0.5).abs() < 1e-15 && (m.a12 - 0.5).abs() < 1e-15);
    }
}
