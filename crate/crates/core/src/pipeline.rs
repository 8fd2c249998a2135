//! End-to-end construction of `ξ_{m,k}`: group, fundamental disk, orbit,
//! weld, topology and energy.

use log::info;
use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::assembly::{orbit_mesh, weld, ClosedMesh};
use crate::energy::{willmore_energy, EnergyReport, SolvedAreas};
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::plateau::{containment_check, solve_fundamental_disk, MinimizeReport, SolverOptions, StopReason};
use crate::spatial::PointGrid;
use crate::sphere::{rotation_between, Point4, Rotation4};
use crate::symmetry::{gamma, lawson_group, Group, LawsonParams};
use crate::tiling::{tile_center, TileIndex};
use crate::tolerance::TOL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    /// Initial grid resolution of the fundamental disk.
    pub n: usize,
    pub refinements: usize,
    pub solver: SolverOptions,
    pub weld_tol: f64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            n: 16,
            refinements: 2,
            solver: SolverOptions::default(),
            weld_tol: TOL.weld,
        }
    }
}

/// Summary of one solver run on the fundamental disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub triangles: usize,
    pub disk_area: f64,
    /// `|G|` times the disk area.
    pub surface_area: f64,
    pub iterations: usize,
    pub converged: bool,
    pub monotone: bool,
    pub final_grad_sup: f64,
}

impl LevelReport {
    fn new(level: usize, triangles: usize, order: usize, r: &MinimizeReport) -> Self {
        LevelReport {
            level,
            triangles,
            disk_area: r.final_area,
            surface_area: order as f64 * r.final_area,
            iterations: r.iterations,
            converged: r.stop == StopReason::Converged,
            monotone: r.is_monotone(),
            final_grad_sup: r.final_grad_sup,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Surface {
    pub params: LawsonParams,
    pub group: Group,
    pub disk: TriMesh,
    pub solver_runs: Vec<MinimizeReport>,
    pub levels: Vec<LevelReport>,
    pub disk_contained: bool,
    pub closed: ClosedMesh,
    pub euler_characteristic: i64,
    pub genus: i64,
    pub energy: EnergyReport,
}

impl Surface {
    /// Surface areas per refinement level, for comparisons between surfaces.
    pub fn solved_areas(&self) -> SolvedAreas {
        SolvedAreas {
            params: self.params,
            levels: self.levels.iter().map(|l| l.surface_area).collect(),
        }
    }

    pub fn mesh(&self) -> &TriMesh {
        self.closed.mesh()
    }
}

/// Build `ξ_{m,k}` from scratch.
pub fn build_surface(params: &LawsonParams, config: &BuildConfig) -> Result<Surface> {
    let group = lawson_group(params)?;
    info!("group of order {} for ({}, {})", group.order(), params.m(), params.k());
    let (disk, solver_runs) = solve_fundamental_disk(params, config.n, config.refinements, &config.solver)?;
    let mut triangles = 2 * config.n * config.n;
    let levels = solver_runs
        .iter()
        .enumerate()
        .map(|(level, r)| {
            let report = LevelReport::new(level, triangles, group.order(), r);
            triangles *= 4;
            report
        })
        .collect();
    let disk_contained = containment_check(params, &disk, TileIndex { j: 0, l: 0 });
    let closed = weld(&orbit_mesh(&group, &disk), config.weld_tol)?;
    let euler_characteristic = closed.euler_characteristic();
    let genus = closed.genus()?;
    let energy = willmore_energy(&closed, Some(params))?;
    info!(
        "closed surface: {} vertices, chi {euler_characteristic}, genus {genus}, area {}",
        closed.mesh().vertex_count(),
        energy.area
    );
    Ok(Surface {
        params: *params,
        group,
        disk,
        solver_runs,
        levels,
        disk_contained,
        closed,
        euler_characteristic,
        genus,
        energy,
    })
}

/// Rotation moving the centre of tile `T_{0,1}` to the projection pole.
///
/// That tile lies in the other orbit from the one holding the disks, so its
/// centre keeps clear of the surface. The pole `(0,0,0,−1)` itself lies on
/// `ξ_{m,k}` when `k` is odd and cannot be used as is.
pub fn view_rotation(params: &LawsonParams) -> Result<Rotation4> {
    let centre = tile_center(params, TileIndex::new(params, 0, 1));
    rotation_between(&centre, &crate::io::pole())
}

/// Row-major entries of a rotation, for reports.
pub fn matrix_rows(r: &Rotation4) -> [[f64; 4]; 4] {
    let m: &Matrix4<f64> = r.matrix();
    [0, 1, 2, 3].map(|i| [0, 1, 2, 3].map(|j| m[(i, j)]))
}

/// Largest distance from a sample of the fixed circles to the nearest mesh vertex.
///
/// Small values (below the mesh spacing) mean the surface contains every `γ_{j,l}`.
pub fn circle_coverage(params: &LawsonParams, mesh: &TriMesh, samples: usize, radius: f64) -> Result<f64> {
    if samples == 0 || !(radius > 0.0) {
        return Err(Error::InvalidParams("need samples and a positive radius".into()));
    }
    let grid = PointGrid::new(mesh.vertices(), radius);
    let mut worst: f64 = 0.0;
    for j in 0..=i64::from(params.k()) {
        for l in 0..=i64::from(params.m()) {
            let circle = gamma(params, j, l);
            for s in 0..samples {
                let t = std::f64::consts::TAU * s as f64 / samples as f64;
                let p = circle.point(t);
                let d = grid
                    .nearest_within(&p, radius)
                    .map(|i| mesh.vertices()[i].distance(&p))
                    .unwrap_or(f64::INFINITY);
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}

/// Longest edge of the mesh, a measure of its resolution.
pub fn max_edge_length(mesh: &TriMesh) -> f64 {
    mesh.edge_incidence()
        .iter()
        .map(|([a, b], _)| mesh.vertices()[*a].distance(&mesh.vertices()[*b]))
        .fold(0.0, f64::max)
}

/// How far the disk is from the two mirror symmetries of its quadrilateral.
///
/// One reflection swaps the two `P` corners and fixes the `Q` corners, the
/// other the reverse. The defect is the largest distance from a reflected
/// vertex to the nearest vertex of the disk; it is a diagnostic only, the
/// solver does not impose these symmetries.
pub fn symmetry_defect(params: &LawsonParams, disk: &TriMesh) -> f64 {
    let reflect = |a: Point4, b: Point4| {
        let n = (a.0 - b.0).normalize();
        Matrix4::identity() - n * n.transpose() * 2.0
    };
    let mirrors = [
        reflect(params.p(0), params.p(1)),
        reflect(params.q(0), params.q(1)),
    ];
    let spacing = max_edge_length(disk).max(1e-12);
    let grid = PointGrid::new(disk.vertices(), spacing);
    let mut worst: f64 = 0.0;
    for mirror in &mirrors {
        for v in disk.vertices() {
            let image = Point4(mirror * v.0);
            let d = grid
                .nearest_within(&image, spacing)
                .map(|i| disk.vertices()[i].distance(&image))
                .unwrap_or(spacing);
            worst = worst.max(d);
        }
    }
    worst
}
