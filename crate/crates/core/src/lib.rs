//! Analysis and numerical solution of coupled 2x2 singularly perturbed
//! convection-diffusion systems in one and two dimensions.
//!
//! The crate predicts where boundary layers form (from eigen- or
//! `LDL^T`-decompositions of the convection matrices), solves the reduced
//! first-order problem, and checks the predictions against finite-difference
//! solutions on layer-adapted meshes.

pub mod analysis;
pub mod ansatz;
pub mod config;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod par;
pub mod presets;
pub mod rational;
pub mod reduce;
pub mod solve1d;
pub mod solve2d;
pub mod system;
pub mod validate;

pub use error::{Error, Result};
pub use presets::{make_preset, make_preset_named, Preset};
pub use system::{
    BoundaryPart, CoupledSystem1D, CoupledSystem2D, EdgeId, Endpoint, PerturbationSpec, Rhs1D,
    Rhs2D, System,
};
