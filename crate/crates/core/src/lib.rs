//! Triangles and simplices on constant-curvature spaces: unified radius
//! formulas, vertex-based oracles, and numerical verification of Euler-type
//! inequalities in the plane, on the sphere and in the hyperbolic plane.

pub mod cli;
pub mod geometry;
pub mod inequality;
pub mod oracle;
pub mod report;
pub mod sampling;
pub mod simplex;

pub use geometry::{Geometry, GeometryError, Triangle};
pub use inequality::{Registry, HOLDS_FLOOR};
