use thiserror::Error;

/// Errors raised by analysis, reduced solvers and finite-difference solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("characteristic boundary: {0}")]
    CharacteristicBoundary(String),
    #[error("convection matrices do not commute (commutator norm {0:.3e})")]
    NonCommuting(f64),
    #[error("LDL^T pivot breakdown: leading entry {0:.3e} is numerically zero")]
    PivotBreakdown(f64),
    #[error("convection matrix is singular (det = {0:.3e})")]
    SingularConvection(f64),
    #[error("reduced boundary conditions are incompatible: {0}")]
    IncompatibleBcs(String),
    #[error("bad mesh size {0}: need n >= 8 and divisible by 4")]
    BadMeshSize(usize),
    #[error("singular discrete system: {0}")]
    SingularDiscreteSystem(String),
    #[error("mesh too large: {nodes} nodes per direction exceeds {max}")]
    MeshTooLarge { nodes: usize, max: usize },
    #[error("degenerate boundary system for the ansatz coefficients")]
    DegenerateBoundarySystem,
    #[error("unsupported pivot sign pattern: d1 = {d1}, d2 = {d2} have the same sign")]
    UnsupportedSignPattern { d1: f64, d2: f64 },
    #[error("A1 and A2 do not share a unit lower factor L: {0}")]
    NoSharedLFactor(String),
    #[error("layer at {location} is unresolved: {nodes} mesh nodes inside the strip (need 4)")]
    UnresolvedLayer { location: String, nodes: usize },
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::InvalidInput(_) => "InvalidInput",
            Error::CharacteristicBoundary(_) => "CharacteristicBoundary",
            Error::NonCommuting(_) => "NonCommuting",
            Error::PivotBreakdown(_) => "PivotBreakdown",
            Error::SingularConvection(_) => "SingularConvection",
            Error::IncompatibleBcs(_) => "IncompatibleBCs",
            Error::BadMeshSize(_) => "BadMeshSize",
            Error::SingularDiscreteSystem(_) => "SingularDiscreteSystem",
            Error::MeshTooLarge { .. } => "MeshTooLarge",
            Error::DegenerateBoundarySystem => "DegenerateBoundarySystem",
            Error::UnsupportedSignPattern { .. } => "UnsupportedSignPattern",
            Error::NoSharedLFactor(_) => "NoSharedLFactor",
            Error::UnresolvedLayer { .. } => "UnresolvedLayer",
            Error::Config(_) => "Config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
