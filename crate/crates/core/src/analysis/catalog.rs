use super::classify::{classify_boundary, classify_endpoints, BoundaryClassification};
use super::diag::{diagonalize, joint_diagonalize};
use super::ldl::{ldl, shared_ldl};
use crate::error::Result;
use crate::linalg::small::dot;
use crate::linalg::{Mat2, Vec2};
use crate::system::{
    BoundaryPart, CoupledSystem1D, CoupledSystem2D, EdgeId, PerturbationSpec, System,
};
use serde::{Deserialize, Serialize};

/// Entries of `T` below this are treated as structural zeros.
const COUPLING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Strong,
    Weak,
    OverlappingCorner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallParameter {
    Eps,
    Eps1,
    Eps2,
}

/// `exp(-coefficient * dist / epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRate {
    pub coefficient: f64,
    pub parameter: SmallParameter,
    pub epsilon: f64,
}

impl DecayRate {
    /// Distance over which the layer decays by a factor `e`.
    pub fn width(&self) -> f64 {
        self.epsilon / self.coefficient
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeScale {
    #[serde(rename = "O(1)")]
    Order1,
    #[serde(rename = "O(eps1/eps2)")]
    Eps1OverEps2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LayerLocation {
    Part(BoundaryPart),
    Corner { corner: [EdgeId; 2] },
}

impl LayerLocation {
    pub fn part(&self) -> Option<BoundaryPart> {
        match self {
            LayerLocation::Part(p) => Some(*p),
            LayerLocation::Corner { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerPrediction {
    /// Original solution component (1 or 2).
    pub component: usize,
    /// Transformed component responsible for the layer; absent for corners.
    pub source_component: Option<usize>,
    pub location: LayerLocation,
    pub kind: LayerKind,
    pub rate: Option<DecayRate>,
    pub amplitude_scale: AmplitudeScale,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LayerCatalog {
    pub layers: Vec<LayerPrediction>,
}

impl LayerCatalog {
    /// Layers sitting on a single edge or endpoint.
    pub fn boundary_layers(&self) -> impl Iterator<Item = &LayerPrediction> {
        self.layers.iter().filter(|l| l.location.part().is_some())
    }

    pub fn at(&self, part: BoundaryPart) -> impl Iterator<Item = &LayerPrediction> {
        self.layers
            .iter()
            .filter(move |l| l.location.part() == Some(part))
    }

    pub fn has_layer(&self, component: usize, part: BoundaryPart) -> bool {
        self.at(part).any(|l| l.component == component)
    }

    /// Widest predicted layer at `part`, as `epsilon / coefficient`.
    pub fn widest(&self, part: BoundaryPart) -> Option<f64> {
        self.at(part)
            .filter_map(|l| l.rate.map(|r| r.width()))
            .reduce(f64::max)
    }

    /// Boundary parts carrying at least one layer, in a stable order.
    pub fn layer_parts(&self) -> Vec<BoundaryPart> {
        let mut parts: Vec<_> = self.boundary_layers().filter_map(|l| l.location.part()).collect();
        parts.sort();
        parts.dedup();
        parts
    }
}

fn normal_of(part: BoundaryPart) -> Vec2 {
    match part {
        BoundaryPart::Endpoint(e) => [e.normal(), 0.0],
        BoundaryPart::Edge(e) => e.normal(),
    }
}

/// Every original component coupled to a transformed outflow component
/// inherits an O(1) layer at the same rate.
fn one_param_layers(
    t: &Mat2,
    velocity: impl Fn(usize) -> Vec2,
    cls: &BoundaryClassification,
    eps: f64,
) -> Vec<LayerPrediction> {
    let mut out = Vec::new();
    for (k, c) in cls.components.iter().enumerate() {
        for &part in &c.gamma_plus {
            let coefficient = dot(velocity(k), normal_of(part)).abs();
            for j in 0..2 {
                if t.0[j][k].abs() > COUPLING_TOL {
                    out.push(LayerPrediction {
                        component: j + 1,
                        source_component: Some(k + 1),
                        location: LayerLocation::Part(part),
                        kind: LayerKind::Strong,
                        rate: Some(DecayRate {
                            coefficient,
                            parameter: SmallParameter::Eps,
                            epsilon: eps,
                        }),
                        amplitude_scale: AmplitudeScale::Order1,
                    });
                }
            }
        }
    }
    out
}

/// Two parameters, `u = L^{-T} w`:
/// on the outflow part of `w1` the fast `eps1` layer is strong in `u1`
/// and, through the coupling `l`, weak (`O(eps1/eps2)`) in `u2`; on the
/// outflow part of `w2` the `eps2` layer appears in both `u2` and
/// `u1 = w1 - l w2`.
fn two_param_layers(
    l: f64,
    velocity: impl Fn(usize) -> Vec2,
    cls: &BoundaryClassification,
    eps1: f64,
    eps2: f64,
) -> Vec<LayerPrediction> {
    let coupled = l.abs() > COUPLING_TOL;
    let mut out = Vec::new();
    let mut push = |component, source, part, kind, coefficient, parameter, epsilon, scale| {
        out.push(LayerPrediction {
            component,
            source_component: Some(source),
            location: LayerLocation::Part(part),
            kind,
            rate: Some(DecayRate {
                coefficient,
                parameter,
                epsilon,
            }),
            amplitude_scale: scale,
        })
    };
    for &part in &cls.components[0].gamma_plus {
        let c = dot(velocity(0), normal_of(part)).abs();
        push(1, 1, part, LayerKind::Strong, c, SmallParameter::Eps1, eps1, AmplitudeScale::Order1);
        if coupled {
            push(2, 1, part, LayerKind::Weak, c, SmallParameter::Eps1, eps1, AmplitudeScale::Eps1OverEps2);
        }
    }
    for &part in &cls.components[1].gamma_plus {
        let c = dot(velocity(1), normal_of(part)).abs();
        if coupled {
            push(1, 2, part, LayerKind::Strong, c, SmallParameter::Eps2, eps2, AmplitudeScale::Order1);
        }
        push(2, 2, part, LayerKind::Strong, c, SmallParameter::Eps2, eps2, AmplitudeScale::Order1);
    }
    out
}

const CORNERS: [[EdgeId; 2]; 4] = [
    [EdgeId::Left, EdgeId::Bottom],
    [EdgeId::Left, EdgeId::Top],
    [EdgeId::Right, EdgeId::Bottom],
    [EdgeId::Right, EdgeId::Top],
];

/// Corner entries where both adjacent edges carry a layer of a component.
fn corner_layers(layers: &[LayerPrediction]) -> Vec<LayerPrediction> {
    let has = |component: usize, edge: EdgeId| {
        layers.iter().any(|l| {
            l.component == component && l.location == LayerLocation::Part(BoundaryPart::Edge(edge))
        })
    };
    let mut out = Vec::new();
    for component in 1..=2 {
        for corner in CORNERS {
            if has(component, corner[0]) && has(component, corner[1]) {
                out.push(LayerPrediction {
                    component,
                    source_component: None,
                    location: LayerLocation::Corner { corner },
                    kind: LayerKind::OverlappingCorner,
                    rate: None,
                    amplitude_scale: AmplitudeScale::Order1,
                });
            }
        }
    }
    out
}

pub fn layer_catalog_1d(sys: &CoupledSystem1D) -> Result<LayerCatalog> {
    let layers = match sys.perturbation {
        PerturbationSpec::OneParam { eps } => {
            let d = diagonalize(&sys.convection);
            let cls = classify_endpoints(d.lambda1);
            one_param_layers(&d.t, |k| [d.lambda1[k], 0.0], &cls, eps)
        }
        PerturbationSpec::TwoParam { eps1, eps2 } => {
            let f = ldl(&sys.convection)?;
            let cls = classify_endpoints(f.pivots());
            let d = f.pivots();
            two_param_layers(f.l, |k| [d[k], 0.0], &cls, eps1, eps2)
        }
    };
    Ok(LayerCatalog { layers })
}

pub fn layer_catalog_2d(sys: &CoupledSystem2D) -> Result<LayerCatalog> {
    let mut layers = match sys.perturbation {
        PerturbationSpec::OneParam { eps } => {
            let d = joint_diagonalize(&sys.a1, &sys.a2)?;
            let cls = classify_boundary(d.velocity(0), d.velocity(1));
            one_param_layers(&d.t, |k| d.velocity(k), &cls, eps)
        }
        PerturbationSpec::TwoParam { eps1, eps2 } => {
            let s = shared_ldl(&sys.a1, &sys.a2)?;
            let cls = classify_boundary(s.velocity(0), s.velocity(1));
            two_param_layers(s.l, |k| s.velocity(k), &cls, eps1, eps2)
        }
    };
    let corners = corner_layers(&layers);
    layers.extend(corners);
    Ok(LayerCatalog { layers })
}

pub fn layer_catalog(sys: &System) -> Result<LayerCatalog> {
    match sys {
        System::OneD(s) => layer_catalog_1d(s),
        System::TwoD(s) => layer_catalog_2d(s),
    }
}
