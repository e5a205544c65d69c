//! JSON system configuration files.
//!
//! ```json
//! { "dimension": 1, "epsilon": 0.01,
//!   "convection": [[-3, -4], [-4, 3]], "reaction": [[0, 0], [0, 0]],
//!   "rhs": { "kind": "constant", "value": [1, 2] } }
//! ```
//!
//! 2D files use `a1`, `a2` and `rho`; `epsilon` may be `[eps1, eps2]`.
//! A `preset` name overrides every other field.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, SymMat2};
use crate::presets::make_preset_named;
use crate::system::{
    CoupledSystem1D, CoupledSystem2D, PerturbationSpec, Rhs1D, Rhs2D, System,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Epsilon {
    One(f64),
    Two([f64; 2]),
}

impl From<PerturbationSpec> for Epsilon {
    fn from(p: PerturbationSpec) -> Self {
        match p {
            PerturbationSpec::OneParam { eps } => Epsilon::One(eps),
            PerturbationSpec::TwoParam { eps1, eps2 } => Epsilon::Two([eps1, eps2]),
        }
    }
}

impl Epsilon {
    pub fn to_spec(self) -> PerturbationSpec {
        match self {
            Epsilon::One(eps) => PerturbationSpec::OneParam { eps },
            Epsilon::Two([eps1, eps2]) => PerturbationSpec::TwoParam { eps1, eps2 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Epsilon>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convection: Option<Mat2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaction: Option<Mat2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<Mat2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<Mat2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<serde_json::Value>,
}

fn symmetric(name: &str, m: Option<Mat2>) -> Result<SymMat2> {
    let m = m.ok_or_else(|| Error::Config(format!("missing field `{name}`")))?;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    if (m.0[0][1] - m.0[1][0]).abs() > SYMMETRY_TOL * scale {
        return Err(Error::Config(format!("`{name}` is not symmetric: {:?}", m.0)));
    }
    Ok(SymMat2::from_mat2(&m))
}

fn required<T>(name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing field `{name}`")))
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn to_system(&self) -> Result<System> {
        if let Some(name) = &self.preset {
            return make_preset_named(name);
        }
        let perturbation = required("epsilon", self.epsilon)?.to_spec();
        perturbation.check()?;
        let rhs = required("rhs", self.rhs.clone())?;
        match self.dimension {
            Some(1) => Ok(System::OneD(CoupledSystem1D {
                perturbation,
                convection: symmetric("convection", self.convection)?,
                reaction: match self.reaction {
                    Some(_) => symmetric("reaction", self.reaction)?,
                    None => SymMat2::zero(),
                },
                rhs: serde_json::from_value::<Rhs1D>(rhs)
                    .map_err(|e| Error::Config(format!("rhs: {e}")))?,
            })),
            Some(2) => {
                let rho = self.rho.unwrap_or(0.0);
                Ok(System::TwoD(CoupledSystem2D {
                    perturbation,
                    a1: symmetric("a1", self.a1)?,
                    a2: symmetric("a2", self.a2)?,
                    rho,
                    rhs: serde_json::from_value::<Rhs2D>(rhs)
                        .map_err(|e| Error::Config(format!("rhs: {e}")))?,
                }))
            }
            Some(d) => Err(Error::Config(format!("dimension must be 1 or 2, got {d}"))),
            None => Err(Error::Config("missing field `dimension`".into())),
        }
    }

    pub fn from_system(sys: &System) -> Self {
        match sys {
            System::OneD(s) => SystemConfig {
                dimension: Some(1),
                epsilon: Some(s.perturbation.into()),
                convection: Some(s.convection.to_mat2()),
                reaction: Some(s.reaction.to_mat2()),
                rhs: Some(serde_json::to_value(&s.rhs).expect("rhs serializes")),
                ..Default::default()
            },
            System::TwoD(s) => SystemConfig {
                dimension: Some(2),
                epsilon: Some(s.perturbation.into()),
                a1: Some(s.a1.to_mat2()),
                a2: Some(s.a2.to_mat2()),
                rho: Some(s.rho),
                rhs: Some(serde_json::to_value(&s.rhs).expect("rhs serializes")),
                ..Default::default()
            },
        }
    }
}
