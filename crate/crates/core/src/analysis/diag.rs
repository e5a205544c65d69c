use crate::error::{Error, Result};
use crate::linalg::small::dot;
use crate::linalg::{Mat2, SymMat2, Vec2};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Relative tolerance for the commutation test and scalar-matrix detection.
pub const COMMUTE_TOL: f64 = 1e-10;

/// `A_i = T diag(lambda_i) T^T` with `T = [[sin φ, cos φ], [-cos φ, sin φ]]`.
///
/// `lambda1[k]`, `lambda2[k]` are the eigenvalues of `A1`, `A2` on column `k`
/// of `T`; the transformed component `v_k = (T^T u)_k` is transported with
/// velocity `(lambda1[k], lambda2[k])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDiagonalization {
    pub phi: f64,
    pub t: Mat2,
    pub lambda1: Vec2,
    pub lambda2: Vec2,
}

impl JointDiagonalization {
    /// Velocity of transformed component `k` (0-based).
    pub fn velocity(&self, k: usize) -> Vec2 {
        [self.lambda1[k], self.lambda2[k]]
    }

    /// `v = T^T u`.
    pub fn to_transformed(&self, u: Vec2) -> Vec2 {
        self.t.transpose().mul_vec(u)
    }

    /// `u = T v`.
    pub fn from_transformed(&self, v: Vec2) -> Vec2 {
        self.t.mul_vec(v)
    }

    pub fn reconstruct(&self, lambda: Vec2) -> SymMat2 {
        SymMat2::from_mat2(&self.t.mul(&Mat2::diag(lambda)).mul(&self.t.transpose()))
    }
}

pub fn commutes(a1: &SymMat2, a2: &SymMat2) -> bool {
    a1.commutator(a2).norm() <= COMMUTE_TOL * a1.norm() * a2.norm()
}

/// The eigenvector ordering follows the first non-scalar matrix: descending
/// eigenvalues, first column with leading nonzero entry positive, second
/// column its +90° rotation (so `T` is a proper rotation).
pub fn joint_diagonalize(a1: &SymMat2, a2: &SymMat2) -> Result<JointDiagonalization> {
    if !commutes(a1, a2) {
        return Err(Error::NonCommuting(a1.commutator(a2).norm()));
    }
    let first = if !a1.is_scalar(COMMUTE_TOL) {
        a1.eigen().vector(0)
    } else if !a2.is_scalar(COMMUTE_TOL) {
        a2.eigen().vector(0)
    } else {
        [1.0, 0.0]
    };
    let second = [-first[1], first[0]];
    let t = Mat2::from_cols(first, second);
    let rayleigh = |a: &SymMat2| -> Vec2 {
        if a.is_scalar(0.0) {
            return [a.a11, a.a11];
        }
        [dot(first, a.mul_vec(first)), dot(second, a.mul_vec(second))]
    };
    let phi = second[1].atan2(second[0]).rem_euclid(TAU);
    Ok(JointDiagonalization {
        phi,
        t,
        lambda1: rayleigh(a1),
        lambda2: rayleigh(a2),
    })
}

/// Diagonalization of a single symmetric matrix in the same parametrization.
/// The speeds are `lambda1`; `lambda2` is zero.
pub fn diagonalize(c: &SymMat2) -> JointDiagonalization {
    joint_diagonalize(c, &SymMat2::zero()).expect("anything commutes with zero")
}
