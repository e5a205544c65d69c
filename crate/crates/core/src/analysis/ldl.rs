use crate::error::{Error, Result};
use crate::linalg::{Mat2, SymMat2, Vec2};
use serde::{Deserialize, Serialize};

const PIVOT_TOL: f64 = 1e-12;
const SHARED_TOL: f64 = 1e-10;

/// `C = L D L^T` with `L = [[1, 0], [l, 1]]`, `D = diag(d1, d2)`.
///
/// `dhat = -d1 d2 = -det C`. The two-parameter theory wants pivots of
/// opposite sign (`dhat > 0`); other patterns are reported in `warnings`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdlFactorization {
    pub l: f64,
    pub d1: f64,
    pub d2: f64,
    pub dhat: f64,
    pub warnings: Vec<String>,
}

impl LdlFactorization {
    fn from_parts(l: f64, d1: f64, d2: f64) -> Self {
        let dhat = -d1 * d2;
        let mut warnings = Vec::new();
        if dhat <= 0.0 {
            warnings.push(format!(
                "pivots d1 = {d1}, d2 = {d2} do not have opposite signs (dhat = {dhat})"
            ));
        }
        LdlFactorization {
            l,
            d1,
            d2,
            dhat,
            warnings,
        }
    }

    pub fn lower(&self) -> Mat2 {
        Mat2([[1.0, 0.0], [self.l, 1.0]])
    }

    pub fn pivots(&self) -> Vec2 {
        [self.d1, self.d2]
    }

    pub fn reconstruct(&self) -> SymMat2 {
        let l = self.lower();
        SymMat2::from_mat2(&l.mul(&Mat2::diag(self.pivots())).mul(&l.transpose()))
    }
}

pub fn ldl(c: &SymMat2) -> Result<LdlFactorization> {
    if c.a11.abs() <= PIVOT_TOL * c.norm() || c.a11 == 0.0 {
        return Err(Error::PivotBreakdown(c.a11));
    }
    let l = c.a12 / c.a11;
    Ok(LdlFactorization::from_parts(l, c.a11, c.a22 - l * c.a12))
}

/// Common unit lower factor of `A1` and `A2`: `A_i = L diag(d^i) L^T`.
///
/// The transformed component `k` of `L^T u` is transported with velocity
/// `(d_a1[k], d_a2[k])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedLdl {
    pub l: f64,
    pub d_a1: Vec2,
    pub d_a2: Vec2,
}

impl SharedLdl {
    pub fn velocity(&self, k: usize) -> Vec2 {
        [self.d_a1[k], self.d_a2[k]]
    }

    pub fn lower(&self) -> Mat2 {
        Mat2([[1.0, 0.0], [self.l, 1.0]])
    }
}

pub fn shared_ldl(a1: &SymMat2, a2: &SymMat2) -> Result<SharedLdl> {
    let scale = a1.norm().max(a2.norm());
    let usable = |m: &SymMat2| m.a11.abs() > PIVOT_TOL * scale;
    let l = if usable(a1) {
        a1.a12 / a1.a11
    } else if usable(a2) {
        a2.a12 / a2.a11
    } else if a1.a12.abs() <= PIVOT_TOL * scale && a2.a12.abs() <= PIVOT_TOL * scale {
        0.0
    } else {
        return Err(Error::PivotBreakdown(a1.a11.abs().max(a2.a11.abs())));
    };
    for (name, m) in [("A1", a1), ("A2", a2)] {
        let mismatch = m.a12 - l * m.a11;
        if mismatch.abs() > SHARED_TOL * scale {
            return Err(Error::NoSharedLFactor(format!(
                "{name} has off-diagonal {} but l * a11 = {}",
                m.a12,
                l * m.a11
            )));
        }
    }
    let d = |m: &SymMat2| [m.a11, m.a22 - l * l * m.a11];
    Ok(SharedLdl {
        l,
        d_a1: d(a1),
        d_a2: d(a2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_matrix_pivots() {
        // C = -[[3,4],[4,-3]]: l = 4/3, d = (-3, 25/3)
        let f = ldl(&SymMat2::new(-3.0, -4.0, 3.0)).unwrap();
        assert!((f.l - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.d1, -3.0);
        assert!((f.d2 - 25.0 / 3.0).abs() < 1e-14);
        assert!((f.dhat - 25.0).abs() < 1e-13);
        assert!(f.warnings.is_empty());
    }

    #[test]
    fn textbook_orientation_pivots() {
        let f = ldl(&SymMat2::new(3.0, 4.0, -3.0)).unwrap();
        assert!((f.l - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.d1, 3.0);
        assert!((f.d2 + 25.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_is_exact_to_rounding() {
        let c = SymMat2::new(2.0, -0.5, 1.0);
        let f = ldl(&c).unwrap();
        assert!(f.reconstruct().sub(&c).norm() < 1e-15);
        assert!(!f.warnings.is_empty());
    }

    #[test]
    fn zero_leading_entry_breaks_down() {
        assert!(matches!(
            ldl(&SymMat2::new(0.0, 1.0, 0.0)),
            Err(Error::PivotBreakdown(_))
        ));
    }

    #[test]
    fn proportional_matrices_share_l() {
        let c = SymMat2::new(-3.0, -4.0, 3.0);
        let s = shared_ldl(&c, &c.scaled(2.0)).unwrap();
        assert!((s.l - 4.0 / 3.0).abs() < 1e-15);
        assert!((s.velocity(1)[1] - 50.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn different_l_is_rejected() {
        let r = shared_ldl(&SymMat2::new(1.0, 1.0, 0.0), &SymMat2::new(1.0, 2.0, 0.0));
        assert!(matches!(r, Err(Error::NoSharedLFactor(_))));
    }

    #[test]
    fn diagonal_pair_has_trivial_factor() {
        let s = shared_ldl(&SymMat2::diag(1.0, -1.0), &SymMat2::diag(0.0, 2.0)).unwrap();
        assert_eq!(s.l, 0.0);
        assert_eq!(s.d_a1, [1.0, -1.0]);
        assert_eq!(s.d_a2, [0.0, 2.0]);
    }
}
