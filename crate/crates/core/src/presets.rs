//! Built-in systems.

use crate::error::{Error, Result};
use crate::linalg::SymMat2;
use crate::system::{
    CoupledSystem1D, CoupledSystem2D, PerturbationSpec, Rhs1D, Rhs2D, System,
};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Example1D,
    Example1DTwoParam,
    DuctFlow,
    CaseI,
    CaseII,
    CaseIII,
    Example2DTwoParam,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Example1D,
        Preset::Example1DTwoParam,
        Preset::DuctFlow,
        Preset::CaseI,
        Preset::CaseII,
        Preset::CaseIII,
        Preset::Example2DTwoParam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1D => "example-1d",
            Preset::Example1DTwoParam => "example-1d-2p",
            Preset::DuctFlow => "duct-flow",
            Preset::CaseI => "case-i",
            Preset::CaseII => "case-ii",
            Preset::CaseIII => "case-iii",
            Preset::Example2DTwoParam => "example-2d-2p",
        }
    }

    /// One-line description of the system and the structure it exhibits.
    pub fn description(self) -> &'static str {
        match self {
            Preset::Example1D => {
                "1D: -eps u'' - [[3,4],[4,-3]] u' = (1,2), u(0)=u(1)=0; eigenvalues +-5, layers at both ends"
            }
            Preset::Example1DTwoParam => {
                "1D two-parameter: -diag(eps1,eps2) u'' - [[3,4],[4,-3]] u' = (1,2); LDL^T pivots (3, -25/3)"
            }
            Preset::DuctFlow => {
                "2D duct-flow coupling: A_i = a_i [[0,1],[1,0]], a = (-1,-1); layers on every edge"
            }
            Preset::CaseI => "2D commuting, all speeds positive: overlapping layers at x1=1 and x2=1",
            Preset::CaseII => {
                "2D commuting, one negative x1-speed: overlapping layers at x2=1, single layers at x1=0 and x1=1"
            }
            Preset::CaseIII => "2D commuting, opposite speeds per component: layers on every edge",
            Preset::Example2DTwoParam => {
                "2D two-parameter: A1 = A2 = -[[3,4],[4,-3]] with shared LDL^T factor, E = diag(eps1, eps2)"
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// `-[[3,4],[4,-3]]`: the 1D example's `-A u'` written as `+C u'`.
const EXAMPLE_CONVECTION: SymMat2 = SymMat2::new(-3.0, -4.0, 3.0);
const SWAP: SymMat2 = SymMat2::new(0.0, 1.0, 0.0);

pub fn make_preset(preset: Preset) -> System {
    let unit_rhs = Rhs2D::Constant { value: [1.0, 1.0] };
    let eps = PerturbationSpec::OneParam { eps: 1e-2 };
    let commuting = |a1: SymMat2, a2: SymMat2| {
        System::TwoD(CoupledSystem2D {
            perturbation: eps,
            a1,
            a2,
            rho: 0.0,
            rhs: unit_rhs.clone(),
        })
    };
    match preset {
        Preset::Example1D => System::OneD(CoupledSystem1D {
            perturbation: eps,
            convection: EXAMPLE_CONVECTION,
            reaction: SymMat2::zero(),
            rhs: Rhs1D::Constant { value: [1.0, 2.0] },
        }),
        Preset::Example1DTwoParam => System::OneD(CoupledSystem1D {
            perturbation: PerturbationSpec::TwoParam {
                eps1: 1e-6,
                eps2: 1e-3,
            },
            convection: EXAMPLE_CONVECTION,
            reaction: SymMat2::zero(),
            rhs: Rhs1D::Constant { value: [1.0, 2.0] },
        }),
        Preset::DuctFlow => {
            let a = [-1.0, -1.0];
            commuting(SWAP.scaled(a[0]), SWAP.scaled(a[1]))
        }
        Preset::CaseI => commuting(SymMat2::identity(), SymMat2::identity()),
        Preset::CaseII => commuting(SymMat2::diag(1.0, -1.0), SymMat2::identity()),
        Preset::CaseIII => commuting(SymMat2::diag(1.0, -1.0), SymMat2::diag(1.0, -1.0)),
        Preset::Example2DTwoParam => System::TwoD(CoupledSystem2D {
            perturbation: PerturbationSpec::TwoParam {
                eps1: 1e-5,
                eps2: 1e-2,
            },
            a1: EXAMPLE_CONVECTION,
            a2: EXAMPLE_CONVECTION,
            rho: 0.0,
            rhs: Rhs2D::Constant { value: [1.0, 2.0] },
        }),
    }
}

pub fn make_preset_named(name: &str) -> Result<System> {
    name.parse().map(make_preset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_1d_is_the_sign_flipped_textbook_matrix() {
        let sys = make_preset_named("example-1d").unwrap().into_1d().unwrap();
        assert_eq!(sys.convection, SymMat2::new(3.0, 4.0, -3.0).scaled(-1.0));
        assert_eq!(sys.rhs, Rhs1D::Constant { value: [1.0, 2.0] });
        assert_eq!(sys.reaction, SymMat2::zero());
    }

    #[test]
    fn duct_flow_uses_swap_coupling() {
        let sys = make_preset(Preset::DuctFlow).into_2d().unwrap();
        assert_eq!(sys.a1, SymMat2::new(0.0, -1.0, 0.0));
        assert_eq!(sys.a2, SymMat2::new(0.0, -1.0, 0.0));
        assert_eq!(sys.rho, 0.0);
    }

    #[test]
    fn case_i_has_all_positive_speeds() {
        let sys = make_preset(Preset::CaseI).into_2d().unwrap();
        for m in [sys.a1, sys.a2] {
            let e = m.eigen();
            assert!(e.values.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert_eq!(
            make_preset_named("case-iv"),
            Err(Error::UnknownPreset("case-iv".into()))
        );
    }

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
    }
}
