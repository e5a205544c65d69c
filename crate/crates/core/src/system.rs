//! Problem definitions for coupled 2x2 convection-diffusion systems.
//!
//! Sign conventions:
//!
//! * 2D: `-E Δu + A1 ∂u/∂x1 + A2 ∂u/∂x2 + ρ u = f` on the unit square.
//! * 1D: `-E u'' + C u' + R u = f` on `[0, 1]`. A system written as
//!   `-ε u'' - A u' = f` enters with `C = -A` and `R = 0`.
//!
//! `E` is `ε I` for one small parameter and `diag(ε1, ε2)` for two.
//! Boundary conditions are homogeneous Dirichlet throughout.

use crate::error::{Error, Result};
use crate::linalg::{SymMat2, Vec2};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    OneParam { eps: f64 },
    TwoParam { eps1: f64, eps2: f64 },
}

impl PerturbationSpec {
    pub fn check(&self) -> Result<()> {
        match *self {
            PerturbationSpec::OneParam { eps } if !(eps > 0.0 && eps.is_finite()) => Err(
                Error::InvalidInput(format!("epsilon must be positive, got {eps}")),
            ),
            PerturbationSpec::TwoParam { eps1, eps2 }
                if !(eps1 > 0.0 && eps2 > 0.0 && eps1.is_finite() && eps2.is_finite()) =>
            {
                Err(Error::InvalidInput(format!(
                    "epsilons must be positive, got ({eps1}, {eps2})"
                )))
            }
            PerturbationSpec::TwoParam { eps1, eps2 } if eps1 > eps2 => Err(Error::InvalidInput(
                format!("two-parameter problems need eps1 <= eps2, got ({eps1}, {eps2})"),
            )),
            _ => Ok(()),
        }
    }

    /// Diagonal of the diffusion matrix `E`.
    pub fn diffusion(&self) -> Vec2 {
        match *self {
            PerturbationSpec::OneParam { eps } => [eps, eps],
            PerturbationSpec::TwoParam { eps1, eps2 } => [eps1, eps2],
        }
    }

    pub fn is_two_param(&self) -> bool {
        matches!(self, PerturbationSpec::TwoParam { .. })
    }
}

/// Right-hand side on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rhs1D {
    Constant { value: Vec2 },
    /// `f(x) = Σ_k coeffs[k] x^k`.
    Polynomial { coeffs: Vec<Vec2> },
}

impl Rhs1D {
    pub fn eval(&self, x: f64) -> Vec2 {
        match self {
            Rhs1D::Constant { value } => *value,
            Rhs1D::Polynomial { coeffs } => coeffs.iter().rev().fold([0.0, 0.0], |acc, c| {
                [acc[0] * x + c[0], acc[1] * x + c[1]]
            }),
        }
    }

    /// Ascending coefficient list (constant term first).
    pub fn coefficients(&self) -> Vec<Vec2> {
        match self {
            Rhs1D::Constant { value } => vec![*value],
            Rhs1D::Polynomial { coeffs } => coeffs.clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Rhs1D {
        match self {
            Rhs1D::Constant { value } => Rhs1D::Constant {
                value: [value[0] * s, value[1] * s],
            },
            Rhs1D::Polynomial { coeffs } => Rhs1D::Polynomial {
                coeffs: coeffs.iter().map(|c| [c[0] * s, c[1] * s]).collect(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients().iter().all(|c| c[0] == 0.0 && c[1] == 0.0)
    }
}

/// Right-hand side on the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rhs2D {
    Constant { value: Vec2 },
    /// `f(x1, x2) = Σ_{i,j} coeffs[i][j] x1^i x2^j`.
    Polynomial { coeffs: Vec<Vec<Vec2>> },
}

impl Rhs2D {
    pub fn eval(&self, x1: f64, x2: f64) -> Vec2 {
        match self {
            Rhs2D::Constant { value } => *value,
            Rhs2D::Polynomial { coeffs } => {
                coeffs.iter().rev().fold([0.0, 0.0], |acc, row| {
                    let inner = row.iter().rev().fold([0.0, 0.0], |a, c| {
                        [a[0] * x2 + c[0], a[1] * x2 + c[1]]
                    });
                    [acc[0] * x1 + inner[0], acc[1] * x1 + inner[1]]
                })
            }
        }
    }

    pub fn as_constant(&self) -> Option<Vec2> {
        match self {
            Rhs2D::Constant { value } => Some(*value),
            Rhs2D::Polynomial { .. } => None,
        }
    }

    pub fn scaled(&self, s: f64) -> Rhs2D {
        match self {
            Rhs2D::Constant { value } => Rhs2D::Constant {
                value: [value[0] * s, value[1] * s],
            },
            Rhs2D::Polynomial { coeffs } => Rhs2D::Polynomial {
                coeffs: coeffs
                    .iter()
                    .map(|r| r.iter().map(|c| [c[0] * s, c[1] * s]).collect())
                    .collect(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rhs2D::Constant { value } => value[0] == 0.0 && value[1] == 0.0,
            Rhs2D::Polynomial { coeffs } => coeffs.iter().flatten().all(|c| c[0] == 0.0 && c[1] == 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledSystem1D {
    pub perturbation: PerturbationSpec,
    /// `C` in `-E u'' + C u' + R u = f`.
    pub convection: SymMat2,
    pub reaction: SymMat2,
    pub rhs: Rhs1D,
}

impl CoupledSystem1D {
    pub fn with_perturbation(&self, perturbation: PerturbationSpec) -> Self {
        CoupledSystem1D {
            perturbation,
            ..self.clone()
        }
    }

    pub fn with_rhs(&self, rhs: Rhs1D) -> Self {
        CoupledSystem1D {
            rhs,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledSystem2D {
    pub perturbation: PerturbationSpec,
    pub a1: SymMat2,
    pub a2: SymMat2,
    pub rho: f64,
    pub rhs: Rhs2D,
}

impl CoupledSystem2D {
    pub fn with_perturbation(&self, perturbation: PerturbationSpec) -> Self {
        CoupledSystem2D {
            perturbation,
            ..self.clone()
        }
    }

    pub fn with_rhs(&self, rhs: Rhs2D) -> Self {
        CoupledSystem2D {
            rhs,
            ..self.clone()
        }
    }
}

/// Either dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum System {
    OneD(CoupledSystem1D),
    TwoD(CoupledSystem2D),
}

impl System {
    pub fn perturbation(&self) -> PerturbationSpec {
        match self {
            System::OneD(s) => s.perturbation,
            System::TwoD(s) => s.perturbation,
        }
    }

    pub fn with_perturbation(&self, p: PerturbationSpec) -> System {
        match self {
            System::OneD(s) => System::OneD(s.with_perturbation(p)),
            System::TwoD(s) => System::TwoD(s.with_perturbation(p)),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            System::OneD(_) => 1,
            System::TwoD(_) => 2,
        }
    }

    pub fn into_1d(self) -> Option<CoupledSystem1D> {
        match self {
            System::OneD(s) => Some(s),
            System::TwoD(_) => None,
        }
    }

    pub fn into_2d(self) -> Option<CoupledSystem2D> {
        match self {
            System::TwoD(s) => Some(s),
            System::OneD(_) => None,
        }
    }
}

/// Edge of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeId {
    /// `x1 = 0`
    Left,
    /// `x1 = 1`
    Right,
    /// `x2 = 0`
    Bottom,
    /// `x2 = 1`
    Top,
}

impl EdgeId {
    pub const ALL: [EdgeId; 4] = [EdgeId::Left, EdgeId::Right, EdgeId::Bottom, EdgeId::Top];

    /// Outward unit normal.
    pub fn normal(self) -> Vec2 {
        match self {
            EdgeId::Left => [-1.0, 0.0],
            EdgeId::Right => [1.0, 0.0],
            EdgeId::Bottom => [0.0, -1.0],
            EdgeId::Top => [0.0, 1.0],
        }
    }

    /// Distance of `(x1, x2)` to this edge.
    pub fn distance(self, x1: f64, x2: f64) -> f64 {
        match self {
            EdgeId::Left => x1,
            EdgeId::Right => 1.0 - x1,
            EdgeId::Bottom => x2,
            EdgeId::Top => 1.0 - x2,
        }
    }

    /// True for the edges normal to the x1 axis.
    pub fn is_vertical(self) -> bool {
        matches!(self, EdgeId::Left | EdgeId::Right)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeId::Left => "left (x1=0)",
            EdgeId::Right => "right (x1=1)",
            EdgeId::Bottom => "bottom (x2=0)",
            EdgeId::Top => "top (x2=1)",
        };
        f.write_str(s)
    }
}

/// Endpoint of the interval `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Endpoint {
    #[serde(rename = "x=0")]
    Zero,
    #[serde(rename = "x=1")]
    One,
}

impl Endpoint {
    pub const ALL: [Endpoint; 2] = [Endpoint::Zero, Endpoint::One];

    /// Outward normal, `-1` at `x = 0` and `+1` at `x = 1`.
    pub fn normal(self) -> f64 {
        match self {
            Endpoint::Zero => -1.0,
            Endpoint::One => 1.0,
        }
    }

    pub fn x(self) -> f64 {
        match self {
            Endpoint::Zero => 0.0,
            Endpoint::One => 1.0,
        }
    }

    pub fn distance(self, x: f64) -> f64 {
        (x - self.x()).abs()
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Endpoint::Zero => "x=0",
            Endpoint::One => "x=1",
        })
    }
}

/// A piece of the boundary: an interval endpoint or an edge of the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryPart {
    Endpoint(Endpoint),
    Edge(EdgeId),
}

impl fmt::Display for BoundaryPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPart::Endpoint(e) => e.fmt(f),
            BoundaryPart::Edge(e) => e.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normals_are_signed_unit_vectors() {
        for e in EdgeId::ALL {
            let n = e.normal();
            assert_eq!(n[0].abs() + n[1].abs(), 1.0);
        }
        assert_eq!(EdgeId::Right.normal(), [1.0, 0.0]);
        assert_eq!(Endpoint::Zero.normal(), -1.0);
    }

    #[test]
    fn two_param_ordering_is_enforced() {
        assert!(PerturbationSpec::TwoParam { eps1: 1e-3, eps2: 1e-6 }.check().is_err());
        assert!(PerturbationSpec::TwoParam { eps1: 1e-6, eps2: 1e-3 }.check().is_ok());
        assert!(PerturbationSpec::OneParam { eps: 0.0 }.check().is_err());
    }

    #[test]
    fn polynomial_rhs_evaluates_by_horner() {
        let f = Rhs1D::Polynomial {
            coeffs: vec![[1.0, 0.0], [0.0, 2.0], [3.0, 0.0]],
        };
        assert_eq!(f.eval(2.0), [13.0, 4.0]);
        let g = Rhs2D::Polynomial {
            coeffs: vec![vec![[1.0, 0.0], [0.0, 1.0]], vec![[2.0, 0.0]]],
        };
        // 1 + 2 x1 ; x2
        assert_eq!(g.eval(0.5, 3.0), [2.0, 3.0]);
    }

    #[test]
    fn boundary_parts_serialize_as_plain_names() {
        let s = serde_json::to_string(&[
            BoundaryPart::Edge(EdgeId::Top),
            BoundaryPart::Endpoint(Endpoint::One),
        ])
        .unwrap();
        assert_eq!(s, r#"["top","x=1"]"#);
        let back: Vec<BoundaryPart> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[1], BoundaryPart::Endpoint(Endpoint::One));
    }
}
