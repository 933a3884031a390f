use thiserror::Error;

use crate::constitutive::InvalidCrossSection;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamError {
    #[error("relative rotation of {angle:.6} rad in element {element} is not representable (limit π); refine the mesh")]
    RelativeRotationTooLarge { element: usize, angle: f64 },

    #[error("condensation block of element {element} is singular")]
    SingularCondensationBlock { element: usize },

    #[error("global tangent is singular")]
    SingularTangent,

    #[error("Newton failed in step {step} (λ = {lambda}) after {iterations} iterations: residual {residual:.3e}, increment {increment:.3e}")]
    NonConvergence {
        step: usize,
        lambda: f64,
        iterations: usize,
        residual: f64,
        increment: f64,
    },

    #[error("node {0} has no incident element")]
    DanglingNode(usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid boundary conditions: {0}")]
    InvalidBoundaryCondition(String),

    #[error(transparent)]
    CrossSection(#[from] InvalidCrossSection),
}
