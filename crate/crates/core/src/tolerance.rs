//! Floating-point policy for the whole crate.
//!
//! The geometry being modelled is exact, so every place where a comparison
//! needs slack reads its threshold from a [`Tolerances`] record rather than
//! from a literal.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of `|p|` from 1 for a point on the sphere.
    pub unit: f64,
    /// Frobenius slack for `RᵀR = I` and `det R = 1`.
    pub orth: f64,
    /// Below this norm a vector has no direction.
    pub degenerate: f64,
    /// Frobenius distance under which two group elements are identified.
    pub dedup: f64,
    /// Distance under which boundary vertices of adjacent disk copies merge.
    pub weld: f64,
    /// Inflation of tile walls for membership tests.
    pub tile_wall: f64,
    /// Margin a point must keep from every wall to count as strictly interior.
    pub tile_interior: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        unit: 1e-12,
        orth: 1e-10,
        degenerate: 1e-9,
        dedup: 1e-8,
        weld: 1e-6,
        tile_wall: 1e-9,
        tile_interior: 1e-6,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Crate-wide defaults.
pub const TOL: Tolerances = Tolerances::DEFAULT;
