//! Structural checks on a system before analysis.

use crate::analysis::boundary_matrix;
use crate::linalg::SymMat2;
use crate::system::{CoupledSystem1D, CoupledSystem2D, EdgeId};
use serde::{Deserialize, Serialize};

/// Relative tolerance below which `det B` counts as zero.
pub const CHARACTERISTIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub characteristic_edges: Vec<EdgeId>,
}

impl ValidationReport {
    pub fn status(&self, name: &str) -> Option<CheckStatus> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }

    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }
}

fn check(name: &str, status: CheckStatus, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        status,
        detail: detail.into(),
    }
}

/// `B` is singular relative to its own size.
pub fn is_characteristic(b: &SymMat2) -> bool {
    let n = b.norm();
    n == 0.0 || b.det().abs() <= CHARACTERISTIC_TOL * n * n
}

fn perturbation_check(p: &crate::system::PerturbationSpec) -> Check {
    match p.check() {
        Ok(()) => check("perturbation", CheckStatus::Pass, format!("{p:?}")),
        Err(e) => check("perturbation", CheckStatus::Fail, e.to_string()),
    }
}

/// Never fails; every finding is reported in the returned report.
pub fn validate(sys: &CoupledSystem2D) -> ValidationReport {
    let mut checks = vec![
        perturbation_check(&sys.perturbation),
        check("symmetry", CheckStatus::Pass, "A1, A2 stored as symmetric matrices"),
    ];
    // constant matrices: div A = 0, so coercivity reduces to rho > 0
    let coercivity = if sys.rho > 0.0 {
        check("coercivity", CheckStatus::Pass, format!("rho = {} > 0 = sup|div A|/2", sys.rho))
    } else if sys.rho == 0.0 {
        check(
            "coercivity",
            CheckStatus::Warn,
            "rho = 0: coercivity only through the noncharacteristic boundary",
        )
    } else {
        check("coercivity", CheckStatus::Fail, format!("rho = {} < 0", sys.rho))
    };
    checks.push(coercivity);

    let characteristic_edges: Vec<EdgeId> = EdgeId::ALL
        .into_iter()
        .filter(|&e| is_characteristic(&boundary_matrix(sys, e)))
        .collect();
    if characteristic_edges.is_empty() {
        checks.push(check(
            "noncharacteristic",
            CheckStatus::Pass,
            "B = nu1 A1 + nu2 A2 is nonsingular on every edge",
        ));
    } else {
        let list: Vec<String> = characteristic_edges.iter().map(|e| e.to_string()).collect();
        checks.push(check(
            "noncharacteristic",
            CheckStatus::Warn,
            format!("B singular on: {}", list.join(", ")),
        ));
    }
    ValidationReport {
        checks,
        characteristic_edges,
    }
}

/// 1D analogue: the endpoint matrices are `±C`, so only `C` itself matters.
pub fn validate_1d(sys: &CoupledSystem1D) -> ValidationReport {
    let mut checks = vec![
        perturbation_check(&sys.perturbation),
        check("symmetry", CheckStatus::Pass, "C, R stored as symmetric matrices"),
    ];
    if is_characteristic(&sys.convection) {
        checks.push(check(
            "noncharacteristic",
            CheckStatus::Warn,
            format!("convection matrix singular (det = {:e})", sys.convection.det()),
        ));
    } else {
        checks.push(check("noncharacteristic", CheckStatus::Pass, "C nonsingular"));
    }
    ValidationReport {
        checks,
        characteristic_edges: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{make_preset, Preset};
    use crate::system::{PerturbationSpec, Rhs2D};

    fn system(a1: SymMat2, a2: SymMat2, rho: f64) -> CoupledSystem2D {
        CoupledSystem2D {
            perturbation: PerturbationSpec::OneParam { eps: 1e-2 },
            a1,
            a2,
            rho,
            rhs: Rhs2D::Constant { value: [1.0, 1.0] },
        }
    }

    #[test]
    fn duct_flow_warns_on_coercivity_only() {
        let sys = make_preset(Preset::DuctFlow).into_2d().unwrap();
        let r = validate(&sys);
        assert_eq!(r.status("coercivity"), Some(CheckStatus::Warn));
        assert_eq!(r.status("noncharacteristic"), Some(CheckStatus::Pass));
        assert!(r.characteristic_edges.is_empty());
    }

    #[test]
    fn identity_system_passes_everything() {
        let r = validate(&system(SymMat2::identity(), SymMat2::identity(), 1.0));
        assert!(r.checks.iter().all(|c| c.status == CheckStatus::Pass));
    }

    #[test]
    fn zero_normal_speed_marks_top_and_bottom() {
        // diag(1,-1) keeps B nonsingular on every edge ...
        let r = validate(&system(SymMat2::identity(), SymMat2::diag(1.0, -1.0), 0.0));
        assert!(r.characteristic_edges.is_empty());
        // ... whereas a zero entry in A2 stalls component 2 across x2 = const
        let r = validate(&system(SymMat2::identity(), SymMat2::diag(1.0, 0.0), 0.0));
        assert_eq!(r.characteristic_edges, vec![EdgeId::Bottom, EdgeId::Top]);
        assert_eq!(r.status("noncharacteristic"), Some(CheckStatus::Warn));
    }

    #[test]
    fn validate_is_pure() {
        let sys = make_preset(Preset::CaseII).into_2d().unwrap();
        assert_eq!(validate(&sys), validate(&sys));
    }

    #[test]
    fn negative_reaction_fails() {
        let r = validate(&system(SymMat2::identity(), SymMat2::identity(), -1.0));
        assert!(r.has_failures());
    }
}
