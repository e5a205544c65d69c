use crate::linalg::small::{dot, norm};
use crate::linalg::Vec2;
use crate::system::{BoundaryPart, EdgeId, Endpoint};
use crate::validate::CHARACTERISTIC_TOL;
use serde::{Deserialize, Serialize};

/// Partition of the boundary for one transformed component.
///
/// `gamma_plus` is the outflow part (`velocity . nu > 0`) where the
/// component needs a layer; the reduced problem takes its data on
/// `gamma_minus`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentClassification {
    pub gamma_plus: Vec<BoundaryPart>,
    pub gamma_minus: Vec<BoundaryPart>,
    pub gamma_zero: Vec<BoundaryPart>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryClassification {
    pub components: [ComponentClassification; 2],
}

impl BoundaryClassification {
    pub fn is_characteristic(&self) -> bool {
        self.components.iter().any(|c| !c.gamma_zero.is_empty())
    }
}

fn classify_component(parts: &[(BoundaryPart, Vec2)], velocity: Vec2) -> ComponentClassification {
    let tol = CHARACTERISTIC_TOL * norm(velocity);
    let mut c = ComponentClassification::default();
    for &(part, normal) in parts {
        let s = dot(velocity, normal);
        if norm(velocity) == 0.0 || s.abs() <= tol {
            c.gamma_zero.push(part);
        } else if s > 0.0 {
            c.gamma_plus.push(part);
        } else {
            c.gamma_minus.push(part);
        }
    }
    c
}

/// Classify the edges of the unit square for two transport velocities.
pub fn classify_boundary(v1: Vec2, v2: Vec2) -> BoundaryClassification {
    let parts: Vec<_> = EdgeId::ALL
        .into_iter()
        .map(|e| (BoundaryPart::Edge(e), e.normal()))
        .collect();
    BoundaryClassification {
        components: [classify_component(&parts, v1), classify_component(&parts, v2)],
    }
}

/// Classify the endpoints of `[0, 1]` for two scalar speeds.
pub fn classify_endpoints(speeds: Vec2) -> BoundaryClassification {
    let parts: Vec<_> = Endpoint::ALL
        .into_iter()
        .map(|e| (BoundaryPart::Endpoint(e), [e.normal(), 0.0]))
        .collect();
    BoundaryClassification {
        components: [
            classify_component(&parts, [speeds[0], 0.0]),
            classify_component(&parts, [speeds[1], 0.0]),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BoundaryPart::Edge;

    #[test]
    fn positive_velocity_flows_out_right_and_top() {
        let c = classify_boundary([1.0, 1.0], [-1.0, -1.0]);
        assert_eq!(c.components[0].gamma_plus, vec![Edge(EdgeId::Right), Edge(EdgeId::Top)]);
        assert_eq!(c.components[0].gamma_minus, vec![Edge(EdgeId::Left), Edge(EdgeId::Bottom)]);
        assert_eq!(c.components[1].gamma_plus, vec![Edge(EdgeId::Left), Edge(EdgeId::Bottom)]);
        assert!(!c.is_characteristic());
    }

    #[test]
    fn zero_velocity_component_is_characteristic() {
        let c = classify_boundary([1.0, 0.0], [1.0, 1.0]);
        assert_eq!(c.components[0].gamma_zero, vec![Edge(EdgeId::Bottom), Edge(EdgeId::Top)]);
        assert!(c.is_characteristic());
    }

    #[test]
    fn endpoints_follow_speed_sign() {
        let c = classify_endpoints([5.0, -5.0]);
        assert_eq!(c.components[0].gamma_plus, vec![BoundaryPart::Endpoint(Endpoint::One)]);
        assert_eq!(c.components[1].gamma_plus, vec![BoundaryPart::Endpoint(Endpoint::Zero)]);
        assert_eq!(c.components[1].gamma_minus, vec![BoundaryPart::Endpoint(Endpoint::One)]);
    }
}
