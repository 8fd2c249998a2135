//! Lawson minimal surfaces `ξ_{m,k}` in the unit 3-sphere.
//!
//! The surface is built from its fundamental piece: the least-area disk
//! spanning the geodesic quadrilateral `Γ_{0,0}` is computed numerically and
//! then copied around by the halfturn group `G_{m,k}`. Alongside the geometry
//! the crate carries exact orbifold Euler number arithmetic used to rule out
//! other intersection patterns of symmetric surfaces with the fixed circles.

// `!(x > t)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod energy;
pub mod error;
pub mod io;
pub mod mesh;
pub mod orbifold;
pub mod pipeline;
pub mod plateau;
pub mod shapes;
pub mod sphere;
pub mod symmetry;
pub mod tiling;
pub mod tolerance;

mod spatial;

pub use error::{Error, Result};
pub use mesh::TriMesh;
pub use sphere::{GreatCircle, Point4, Rotation4};
pub use symmetry::{Group, LawsonParams};
pub use tolerance::{Tolerances, TOL};
