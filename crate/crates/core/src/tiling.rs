//! Tetrahedral tiles `T_{j,l} = P_j P_{j+1} ∗ Q_l Q_{l+1}` and their boundary quadrilaterals.
//!
//! A unit point is written as `(r cos α, r sin α, s cos β, s sin β)` with
//! `r² + s² = 1`. The hyperplanes through `γ` and `Q_l` are the half-planes
//! `α = lπ/(m+1)`, those through `γ⊥` and `P_j` are `β = jπ/(k+1)`, so a tile
//! is an angular box.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{geodesic, normalize, vertex_angle, Point4};
use crate::symmetry::{Group, LawsonParams};
use crate::tolerance::TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileIndex {
    pub j: u32,
    pub l: u32,
}

impl TileIndex {
    /// Reduces `j` mod `2k+2` and `l` mod `2m+2`.
    pub fn new(params: &LawsonParams, j: i64, l: i64) -> Self {
        TileIndex {
            j: j.rem_euclid(params.p_count() as i64) as u32,
            l: l.rem_euclid(params.q_count() as i64) as u32,
        }
    }

    pub fn all(params: &LawsonParams) -> Vec<TileIndex> {
        let mut out = Vec::with_capacity(params.tile_count());
        for j in 0..params.p_count() as u32 {
            for l in 0..params.q_count() as u32 {
                out.push(TileIndex { j, l });
            }
        }
        out
    }
}

/// Polar decomposition of a unit point into its two coordinate blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularCoords {
    /// Angle in the `(x0, x1)` block, in `[0, 2π)`; `None` when that block vanishes.
    pub alpha: Option<f64>,
    /// Angle in the `(x2, x3)` block, in `[0, 2π)`; `None` when that block vanishes.
    pub beta: Option<f64>,
    /// Norm of the `(x0, x1)` block.
    pub r: f64,
}

pub fn angular_coords(p: &Point4) -> AngularCoords {
    let [x0, x1, x2, x3] = p.coords();
    let r = x0.hypot(x1);
    let s = x2.hypot(x3);
    let angle = |y: f64, x: f64| y.atan2(x).rem_euclid(TAU);
    AngularCoords {
        alpha: (r >= TOL.degenerate).then(|| angle(x1, x0)),
        beta: (s >= TOL.degenerate).then(|| angle(x3, x2)),
        r,
    }
}

/// Offset of `angle` past `lo`, folded into `[0, 2π)`.
fn offset(angle: f64, lo: f64) -> f64 {
    (angle - lo).rem_euclid(TAU)
}

fn in_arc(angle: Option<f64>, lo: f64, width: f64, tol: f64) -> bool {
    match angle {
        None => true,
        Some(a) => {
            let o = offset(a, lo);
            o <= width + tol || o >= TAU - tol
        }
    }
}

/// Distance from `angle` to the nearest end of the arc `[lo, lo + width]`,
/// negative when outside.
fn arc_margin(angle: f64, lo: f64, width: f64) -> f64 {
    let o = offset(angle, lo);
    if o <= width {
        o.min(width - o)
    } else {
        -(o - width).min(TAU - o)
    }
}

pub fn tile_contains(params: &LawsonParams, idx: TileIndex, p: &Point4, tol: f64) -> bool {
    let c = angular_coords(p);
    let (pw, qw) = (params.p_step(), params.q_step());
    in_arc(c.beta, idx.j as f64 * pw, pw, tol) && in_arc(c.alpha, idx.l as f64 * qw, qw, tol)
}

/// True iff both angles are defined and at least `margin` away from every wall.
pub fn tile_contains_strict(params: &LawsonParams, idx: TileIndex, p: &Point4, margin: f64) -> bool {
    let c = angular_coords(p);
    let (pw, qw) = (params.p_step(), params.q_step());
    match (c.alpha, c.beta) {
        (Some(a), Some(b)) => {
            arc_margin(b, idx.j as f64 * pw, pw) >= margin
                && arc_margin(a, idx.l as f64 * qw, qw) >= margin
        }
        _ => false,
    }
}

/// Canonical interior sample: normalized sum of the two spherical edge midpoints.
pub fn tile_center(params: &LawsonParams, idx: TileIndex) -> Point4 {
    let (j, l) = (idx.j as i64, idx.l as i64);
    let mp = geodesic(&params.p(j), &params.p(j + 1), 0.5).expect("adjacent P_j are distinct");
    let mq = geodesic(&params.q(l), &params.q(l + 1), 0.5).expect("adjacent Q_l are distinct");
    normalize(mp.0 + mq.0).expect("blocks are orthogonal")
}

/// The unique tile containing `p`, which must keep clear of every wall.
pub fn locate_tile(params: &LawsonParams, p: &Point4) -> Result<TileIndex> {
    let hits: Vec<TileIndex> = TileIndex::all(params)
        .into_iter()
        .filter(|&idx| tile_contains(params, idx, p, TOL.tile_wall))
        .collect();
    match hits.as_slice() {
        [idx] if tile_contains_strict(params, *idx, p, TOL.tile_interior) => Ok(*idx),
        [idx] => Err(Error::TileLocationAmbiguous(format!(
            "{p:?} lies within {} of a wall of {idx:?}",
            TOL.tile_interior
        ))),
        _ => Err(Error::TileLocationAmbiguous(format!(
            "{p:?} is in {} tiles",
            hits.len()
        ))),
    }
}

/// Partition of all tiles into orbits of `group`, each sorted, ordered by smallest member.
pub fn tile_orbits(group: &Group, params: &LawsonParams) -> Result<Vec<Vec<TileIndex>>> {
    let tiles = TileIndex::all(params);
    let mut assigned = vec![false; tiles.len()];
    let slot = |idx: TileIndex| idx.j as usize * params.q_count() + idx.l as usize;
    let mut orbits = Vec::new();
    for &start in &tiles {
        if assigned[slot(start)] {
            continue;
        }
        let center = tile_center(params, start);
        let mut orbit = Vec::new();
        for g in group.elements() {
            let image = locate_tile(params, &g.apply(&center))?;
            if !orbit.contains(&image) {
                if assigned[slot(image)] {
                    return Err(Error::TileLocationAmbiguous(format!(
                        "{image:?} reached from two orbits"
                    )));
                }
                orbit.push(image);
            }
        }
        for &idx in &orbit {
            assigned[slot(idx)] = true;
        }
        orbit.sort();
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// Geodesic quadrilateral with ordered corners `P_j, Q_l, P_{j+1}, Q_{l+1}`.
///
/// Edge `e` runs from corner `e` to corner `e + 1 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub vertices: [Point4; 4],
}

impl Quad {
    pub fn edge(&self, e: usize) -> (Point4, Point4) {
        (self.vertices[e % 4], self.vertices[(e + 1) % 4])
    }

    /// Point at arc parameter `t ∈ [0, 1]` along edge `e`.
    pub fn edge_point(&self, e: usize, t: f64) -> Point4 {
        let (a, b) = self.edge(e);
        geodesic(&a, &b, t).expect("quad edges are quarter circles")
    }

    pub fn edge_lengths(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|e| {
            let (a, b) = self.edge(e);
            a.arc_length(&b)
        })
    }

    /// Interior angle at each corner.
    pub fn angles(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| {
            let v = &self.vertices;
            vertex_angle(&v[i], &v[(i + 3) % 4], &v[(i + 1) % 4])
                .expect("adjacent corners are orthogonal")
        })
    }
}

/// `Γ_{j,l}`, the boundary of the minimal disk in `T_{j,l}`.
pub fn quadrilateral(params: &LawsonParams, idx: TileIndex) -> Quad {
    let (j, l) = (idx.j as i64, idx.l as i64);
    Quad {
        vertices: [params.p(j), params.q(l), params.p(j + 1), params.q(l + 1)],
    }
}
