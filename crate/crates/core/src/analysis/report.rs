use super::bcs::{reduced_bcs_one_param, reduced_bcs_two_param, ReducedBc};
use super::catalog::{layer_catalog, LayerCatalog};
use super::classify::{classify_boundary, classify_endpoints, BoundaryClassification};
use super::diag::{diagonalize, joint_diagonalize};
use super::ldl::{ldl, shared_ldl};
use super::{boundary_matrix, split_pm};
use crate::error::Result;
use crate::linalg::{Mat2, SymMat2, Vec2};
use crate::rational::to_rational_string;
use crate::system::{BoundaryPart, EdgeId, Endpoint, PerturbationSpec, System};
use crate::validate::{validate, validate_1d, ValidationReport};
use serde::Serialize;

const MAX_DENOMINATOR: u64 = 1_000_000;

/// A float plus its exact rational form when one is recognized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarOut {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl From<f64> for ScalarOut {
    fn from(value: f64) -> Self {
        ScalarOut {
            value,
            exact: to_rational_string(value, MAX_DENOMINATOR),
        }
    }
}

fn pair(v: Vec2) -> [ScalarOut; 2] {
    [v[0].into(), v[1].into()]
}

/// Row-major matrix; `exact` is present only if every entry is rational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixOut {
    pub rows: [[f64; 2]; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<[[String; 2]; 2]>,
}

impl From<Mat2> for MatrixOut {
    fn from(m: Mat2) -> Self {
        let r = |x: f64| to_rational_string(x, MAX_DENOMINATOR);
        let exact = (|| {
            Some([
                [r(m.0[0][0])?, r(m.0[0][1])?],
                [r(m.0[1][0])?, r(m.0[1][1])?],
            ])
        })();
        MatrixOut { rows: m.0, exact }
    }
}

impl From<SymMat2> for MatrixOut {
    fn from(m: SymMat2) -> Self {
        m.to_mat2().into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryEntry {
    pub location: BoundaryPart,
    pub matrix: MatrixOut,
    pub eigenvalues: [ScalarOut; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_plus: Option<MatrixOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_minus: Option<MatrixOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalizationOut {
    pub phi: f64,
    pub t: MatrixOut,
    pub lambda1: [ScalarOut; 2],
    pub lambda2: [ScalarOut; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LdlOut {
    pub l: ScalarOut,
    /// Pivots of `C` (1D) or `A1` (2D).
    pub d_a1: [ScalarOut; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_a2: Option<[ScalarOut; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dhat: Option<ScalarOut>,
    pub warnings: Vec<String>,
}

/// Everything the analysis derives from a system, ready for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub dimension: usize,
    pub perturbation: PerturbationSpec,
    pub validation: ValidationReport,
    pub boundary: Vec<BoundaryEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonalization: Option<DiagonalizationOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ldl: Option<LdlOut>,
    pub classification: BoundaryClassification,
    pub reduced_bcs: ReducedBc,
    pub layer_catalog: LayerCatalog,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn boundary_entry(location: BoundaryPart, b: SymMat2) -> BoundaryEntry {
    let split = split_pm(&b).ok();
    BoundaryEntry {
        location,
        matrix: b.into(),
        eigenvalues: pair(b.eigen().values),
        b_plus: split.map(|s| s.b_plus.into()),
        b_minus: split.map(|s| s.b_minus.into()),
    }
}

/// Full analysis. Fails when the reduced problem is not well posed
/// (characteristic boundary, non-commuting matrices, LDL breakdown).
pub fn analyze(sys: &System) -> Result<AnalysisReport> {
    let perturbation = sys.perturbation();
    perturbation.check()?;
    let layer_catalog = layer_catalog(sys)?;
    match sys {
        System::OneD(s) => {
            let boundary = Endpoint::ALL
                .into_iter()
                .map(|e| boundary_entry(BoundaryPart::Endpoint(e), s.convection.scaled(e.normal())))
                .collect();
            let (diagonalization, ldl_out, classification, reduced_bcs) = if perturbation.is_two_param() {
                let f = ldl(&s.convection)?;
                let cls = classify_endpoints(f.pivots());
                let bcs = reduced_bcs_two_param(f.l, &cls)?;
                let out = LdlOut {
                    l: f.l.into(),
                    d_a1: pair(f.pivots()),
                    d_a2: None,
                    dhat: Some(f.dhat.into()),
                    warnings: f.warnings,
                };
                (None, Some(out), cls, bcs)
            } else {
                let d = diagonalize(&s.convection);
                let cls = classify_endpoints(d.lambda1);
                let bcs = reduced_bcs_one_param(&d, &cls)?;
                let out = DiagonalizationOut {
                    phi: d.phi,
                    t: d.t.into(),
                    lambda1: pair(d.lambda1),
                    lambda2: pair(d.lambda2),
                };
                (Some(out), None, cls, bcs)
            };
            Ok(AnalysisReport {
                dimension: 1,
                perturbation,
                validation: validate_1d(s),
                boundary,
                diagonalization,
                ldl: ldl_out,
                classification,
                reduced_bcs,
                layer_catalog,
            })
        }
        System::TwoD(s) => {
            let boundary = EdgeId::ALL
                .into_iter()
                .map(|e| boundary_entry(BoundaryPart::Edge(e), boundary_matrix(s, e)))
                .collect();
            let (diagonalization, ldl_out, classification, reduced_bcs) = if perturbation.is_two_param() {
                let f = shared_ldl(&s.a1, &s.a2)?;
                let cls = classify_boundary(f.velocity(0), f.velocity(1));
                let bcs = reduced_bcs_two_param(f.l, &cls)?;
                let out = LdlOut {
                    l: f.l.into(),
                    d_a1: pair(f.d_a1),
                    d_a2: Some(pair(f.d_a2)),
                    dhat: None,
                    warnings: Vec::new(),
                };
                (None, Some(out), cls, bcs)
            } else {
                let d = joint_diagonalize(&s.a1, &s.a2)?;
                let cls = classify_boundary(d.velocity(0), d.velocity(1));
                let bcs = reduced_bcs_one_param(&d, &cls)?;
                let out = DiagonalizationOut {
                    phi: d.phi,
                    t: d.t.into(),
                    lambda1: pair(d.lambda1),
                    lambda2: pair(d.lambda2),
                };
                (Some(out), None, cls, bcs)
            };
            Ok(AnalysisReport {
                dimension: 2,
                perturbation,
                validation: validate(s),
                boundary,
                diagonalization,
                ldl: ldl_out,
                classification,
                reduced_bcs,
                layer_catalog,
            })
        }
    }
}
