use super::classify::BoundaryClassification;
use super::diag::JointDiagonalization;
use crate::error::{Error, Result};
use crate::linalg::small::dot;
use crate::linalg::Vec2;
use crate::system::BoundaryPart;
use serde::{Deserialize, Serialize};

/// One reduced boundary condition: `functional . u0 = 0` on `location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcEntry {
    pub location: BoundaryPart,
    /// Transformed component (1 or 2) whose inflow boundary this is.
    pub component: usize,
    pub functional: Vec2,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReducedBc {
    pub entries: Vec<BcEntry>,
}

impl ReducedBc {
    pub fn at(&self, location: BoundaryPart) -> impl Iterator<Item = &BcEntry> {
        self.entries.iter().filter(move |e| e.location == location)
    }

    pub fn for_component(&self, component: usize) -> impl Iterator<Item = &BcEntry> {
        self.entries.iter().filter(move |e| e.component == component)
    }

    /// Largest `|functional . u|` over all entries.
    pub fn max_residual(&self, u_at: impl Fn(BoundaryPart) -> Vec2) -> f64 {
        self.entries
            .iter()
            .map(|e| dot(e.functional, u_at(e.location)).abs())
            .fold(0.0, f64::max)
    }
}

fn characteristic_error(cls: &BoundaryClassification) -> Option<Error> {
    cls.components.iter().enumerate().find_map(|(k, c)| {
        (!c.gamma_zero.is_empty()).then(|| {
            let parts: Vec<String> = c.gamma_zero.iter().map(|p| p.to_string()).collect();
            Error::CharacteristicBoundary(format!(
                "component {} is tangential on {}",
                k + 1,
                parts.join(", ")
            ))
        })
    })
}

fn build(cls: &BoundaryClassification, functionals: [Vec2; 2]) -> Result<ReducedBc> {
    if let Some(e) = characteristic_error(cls) {
        return Err(e);
    }
    let mut entries = Vec::new();
    for (k, c) in cls.components.iter().enumerate() {
        for &location in &c.gamma_minus {
            entries.push(BcEntry {
                location,
                component: k + 1,
                functional: functionals[k],
            });
        }
    }
    Ok(ReducedBc { entries })
}

/// `(T^T u0)_k = 0` on the inflow part of component `k`.
pub fn reduced_bcs_one_param(
    diag: &JointDiagonalization,
    cls: &BoundaryClassification,
) -> Result<ReducedBc> {
    let tt = diag.t.transpose();
    build(cls, [tt.row(0), tt.row(1)])
}

/// `(L^T u0)_1 = u1 + l u2 = 0` on the inflow part of component 1 and
/// `u2 = 0` on the inflow part of component 2.
pub fn reduced_bcs_two_param(l: f64, cls: &BoundaryClassification) -> Result<ReducedBc> {
    build(cls, [[1.0, l], [0.0, 1.0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{classify_endpoints, diagonalize, ldl};
    use crate::linalg::SymMat2;
    use crate::system::Endpoint;

    #[test]
    fn example_two_param_conditions() {
        let f = ldl(&SymMat2::new(-3.0, -4.0, 3.0)).unwrap();
        let bc = reduced_bcs_two_param(f.l, &classify_endpoints(f.pivots())).unwrap();
        // d1 < 0: component 1 enters at x=1; d2 > 0: component 2 enters at x=0
        let at1: Vec<_> = bc.at(BoundaryPart::Endpoint(Endpoint::One)).collect();
        assert_eq!(at1.len(), 1);
        assert_eq!(at1[0].functional, [1.0, 4.0 / 3.0]);
        let at0: Vec<_> = bc.at(BoundaryPart::Endpoint(Endpoint::Zero)).collect();
        assert_eq!(at0[0].functional, [0.0, 1.0]);
    }

    #[test]
    fn one_param_conditions_use_eigenvector_rows() {
        let d = diagonalize(&SymMat2::new(-3.0, -4.0, 3.0));
        let bc = reduced_bcs_one_param(&d, &classify_endpoints(d.lambda1)).unwrap();
        assert_eq!(bc.entries.len(), 2);
        let e0 = bc.for_component(1).next().unwrap();
        assert_eq!(e0.location, BoundaryPart::Endpoint(Endpoint::Zero));
        let s5 = 5f64.sqrt();
        assert!((e0.functional[0] - 1.0 / s5).abs() < 1e-15);
        assert!((e0.functional[1] + 2.0 / s5).abs() < 1e-15);
    }

    #[test]
    fn characteristic_classification_is_an_error() {
        let cls = classify_endpoints([1.0, 0.0]);
        assert!(matches!(
            reduced_bcs_two_param(0.0, &cls),
            Err(Error::CharacteristicBoundary(_))
        ));
    }
}
