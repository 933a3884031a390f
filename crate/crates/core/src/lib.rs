//! Mixed finite elements for geometrically exact (Simo–Reissner) beams.
//!
//! Positions are continuous across elements, while rotations and stress
//! couples live element by element and are tied to nodal rotations through
//! interface terms. Generic kernels are written over [`Real`]; the aliases
//! below fix the scalar to `f64`.

pub mod real;
pub mod so3;
pub mod constitutive;
pub mod element;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod solver;

pub use error::BeamError;
pub use real::Real;

pub type Vec3 = so3::Vector3<f64>;
pub type Mat3 = so3::Matrix3<f64>;
pub type RotVec = so3::Vector3<f64>;
pub type Rotation = so3::UnitQuaternion<f64>;
