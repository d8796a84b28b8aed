//! Directional flows: first-return maps, renormalization, cylinders and
//! rigidity configurations.

pub mod cylinder;
pub mod frame;
pub mod iet;
pub mod rigidity;
pub mod scalar;
pub mod segment;
pub mod walk;

pub use cylinder::Cylinder;
pub use frame::{exact_frame, float_frame, Direction, ExactFlowSurface, FlowSurface};
pub use iet::{first_return_iet, zorich_step, CocycleStep, Iet, Transversal};
pub use rigidity::{RigidityCase, RigidityCheck, RigidityConfig, RigidityOptions};
pub use scalar::{Scalar, Vec2};
pub use segment::{HSeg, Landing};
pub use walk::{Start, Walk, WalkEnd};

#[cfg(test)]
mod tests;
