//! Matrix decompositions and the layer structure they predict.
//!
//! One small parameter: the convection matrices are diagonalized jointly by a
//! rotation `T`, and every transformed component is a scalar transport
//! problem whose outflow edges carry layers. Two small parameters: the
//! `LDL^T` pivots take over the role of the eigenvalues.

mod bcs;
mod catalog;
mod classify;
mod diag;
mod ldl;
mod report;

pub use bcs::{reduced_bcs_one_param, reduced_bcs_two_param, BcEntry, ReducedBc};
pub use catalog::{
    layer_catalog, layer_catalog_1d, layer_catalog_2d, AmplitudeScale, DecayRate, LayerCatalog,
    LayerKind, LayerLocation, LayerPrediction, SmallParameter,
};
pub use classify::{
    classify_boundary, classify_endpoints, BoundaryClassification, ComponentClassification,
};
pub use diag::{commutes, diagonalize, joint_diagonalize, JointDiagonalization, COMMUTE_TOL};
pub use ldl::{ldl, shared_ldl, LdlFactorization, SharedLdl};
pub use report::{analyze, AnalysisReport, MatrixOut, ScalarOut};

use crate::error::{Error, Result};
use crate::linalg::SymMat2;
use crate::system::{CoupledSystem2D, EdgeId};
use crate::validate::is_characteristic;
use serde::{Deserialize, Serialize};

/// `B = ν1 A1 + ν2 A2` for the outward normal of `edge`.
pub fn boundary_matrix(sys: &CoupledSystem2D, edge: EdgeId) -> SymMat2 {
    let [n1, n2] = edge.normal();
    sys.a1.scaled(n1).add(&sys.a2.scaled(n2))
}

/// `B = B+ + B-` with `B+` positive and `B-` negative semidefinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmSplit {
    pub b_plus: SymMat2,
    pub b_minus: SymMat2,
}

/// Spectral split of a noncharacteristic boundary matrix.
pub fn split_pm(b: &SymMat2) -> Result<PmSplit> {
    if is_characteristic(b) {
        return Err(Error::CharacteristicBoundary(format!(
            "boundary matrix {:?} is singular (det = {:e})",
            b.rows(),
            b.det()
        )));
    }
    let (b_plus, b_minus) = b.spectral_parts();
    Ok(PmSplit { b_plus, b_minus })
}
