//! Discrete Plateau problem: the least-area disk spanning a geodesic quadrilateral.
//!
//! The disk is a triangulated patch with vertices on the 3-sphere. Its area is
//! the sum of chordal triangle areas, and it is minimized by projected
//! gradient descent with the boundary held fixed.

use std::collections::HashMap;

use log::{debug, info};
use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{triangle_area, vertex_normals, BoundaryParam, TriMesh};
use crate::sphere::{geodesic, normalize, Point4};
use crate::symmetry::LawsonParams;
use crate::tiling::{tile_contains, Quad, TileIndex};

/// Transfinite (Coons) interpolation of the four quad edges on an `(n+1)×(n+1)` grid.
///
/// Grid corner `(0,0)` is quad corner 0, `(n,0)` corner 1, `(n,n)` corner 2 and
/// `(0,n)` corner 3. Interior points are normalized onto the sphere; boundary
/// points are placed exactly on the geodesic edges at uniform parameters.
pub fn coons_initial_mesh(quad: &Quad, n: usize) -> Result<TriMesh> {
    if n == 0 {
        return Err(Error::InvalidMesh("grid resolution must be at least 1".into()));
    }
    let c = quad.vertices.map(|p| p.0);
    let nf = n as f64;
    let index = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    let mut boundary = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let (s, t) = (i as f64 / nf, j as f64 / nf);
            let param = if j == 0 && i < n {
                Some((0, s))
            } else if i == n && j < n {
                Some((1, t))
            } else if j == n && i > 0 {
                Some((2, 1.0 - s))
            } else if i == 0 && j > 0 {
                Some((3, 1.0 - t))
            } else {
                None
            };
            match param {
                Some((edge, t)) => {
                    vertices.push(quad.edge_point(edge as usize, t));
                    boundary.push(Some(BoundaryParam { edge, t }));
                }
                None => {
                    let bottom = quad.edge_point(0, s).0;
                    let right = quad.edge_point(1, t).0;
                    let top = quad.edge_point(2, 1.0 - s).0;
                    let left = quad.edge_point(3, 1.0 - t).0;
                    let ruled = bottom * (1.0 - t) + top * t + left * (1.0 - s) + right * s;
                    let bilinear = c[0] * ((1.0 - s) * (1.0 - t))
                        + c[1] * (s * (1.0 - t))
                        + c[2] * (s * t)
                        + c[3] * ((1.0 - s) * t);
                    vertices.push(normalize(ruled - bilinear)?);
                    boundary.push(None);
                }
            }
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (
                index(i, j),
                index(i + 1, j),
                index(i + 1, j + 1),
                index(i, j + 1),
            );
            // Split along the shorter diagonal; near a sharp corner that is
            // the one avoiding the corner.
            if vertices[a].distance(&vertices[c]) < vertices[b].distance(&vertices[d]) {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    TriMesh::with_frame(vertices, triangles, boundary, *quad)
}

/// Sum of chordal triangle areas.
pub fn area(mesh: &TriMesh) -> f64 {
    positions_area(mesh, mesh.vertices())
}

fn positions_area(mesh: &TriMesh, positions: &[Point4]) -> f64 {
    mesh.triangles()
        .iter()
        .map(|&[a, b, c]| triangle_area(&positions[a].0, &positions[b].0, &positions[c].0))
        .sum()
}

/// `area(after) − area(before)`, summed per triangle so that small changes
/// are not lost to cancellation between two large totals.
fn area_change(mesh: &TriMesh, before: &[Point4], after: &[Point4]) -> f64 {
    mesh.triangles()
        .iter()
        .map(|&[a, b, c]| {
            triangle_area(&after[a].0, &after[b].0, &after[c].0)
                - triangle_area(&before[a].0, &before[b].0, &before[c].0)
        })
        .sum()
}

/// Gradient of the chordal area with respect to every vertex position, unconstrained.
pub fn raw_area_gradient(mesh: &TriMesh) -> Vec<Vector4<f64>> {
    raw_gradient_at(mesh, mesh.vertices())
}

fn raw_gradient_at(mesh: &TriMesh, positions: &[Point4]) -> Vec<Vector4<f64>> {
    let mut grad = vec![Vector4::zeros(); positions.len()];
    for tri in mesh.triangles() {
        let p = tri.map(|v| positions[v].0);
        let double_area = 2.0 * triangle_area(&p[0], &p[1], &p[2]);
        if double_area <= f64::MIN_POSITIVE {
            continue;
        }
        for corner in 0..3 {
            let a = p[corner];
            let b = p[(corner + 1) % 3];
            let e = p[(corner + 2) % 3] - b;
            let u = a - b;
            // d|A|/da = (|e|² u − (u·e) e) / (4A)
            grad[tri[corner]] += (u * e.norm_squared() - e * u.dot(&e)) / (2.0 * double_area);
        }
    }
    grad
}

/// Area gradient projected onto the tangent space of the sphere; zero on the boundary.
pub fn area_gradient(mesh: &TriMesh) -> Vec<Vector4<f64>> {
    tangent_gradient(mesh, mesh.vertices())
}

fn tangent_gradient(mesh: &TriMesh, positions: &[Point4]) -> Vec<Vector4<f64>> {
    let mut grad = raw_gradient_at(mesh, positions);
    for (i, g) in grad.iter_mut().enumerate() {
        if mesh.is_boundary(i) {
            *g = Vector4::zeros();
        } else {
            let x = positions[i].0;
            *g -= x * g.dot(&x);
        }
    }
    grad
}

/// The vector field the solver moves along, per `motion`.
fn descent_field(mesh: &TriMesh, positions: &[Point4], motion: Motion) -> Vec<Vector4<f64>> {
    let grad = tangent_gradient(mesh, positions);
    match motion {
        Motion::Tangent => grad,
        Motion::Normal => {
            let normals = vertex_normals(mesh, positions);
            grad.iter()
                .zip(&normals)
                .map(|(g, n)| n * g.dot(n))
                .collect()
        }
    }
}

fn sup_norm(grad: &[Vector4<f64>]) -> f64 {
    grad.iter().map(|g| g.norm()).fold(0.0, f64::max)
}

/// Which part of the area gradient moves the vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Motion {
    /// Only the component along the surface normal (inside the tangent space
    /// of the sphere). Tangential drift is what collapses triangles, so this
    /// is the default.
    Normal,
    /// The full gradient projected onto the tangent space of the sphere.
    Tangent,
}

/// How the first trial step of each line search is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepRule {
    /// Previous accepted step times a growth factor.
    Growth(f64),
    /// Barzilai–Borwein estimate from the last two iterates.
    BarzilaiBorwein,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop once the sup-norm of the descent field drops below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    pub initial_step: f64,
    pub max_step: f64,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    /// Line search gives up below this step.
    pub min_step: f64,
    pub step_rule: StepRule,
    pub motion: Motion,
    /// Every this many iterations, try a tangential relaxation of the
    /// interior vertices, kept only if it does not increase the area; 0 disables.
    pub relax_every: usize,
    /// Emit a progress line every this many iterations; 0 disables.
    pub log_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grad_tol: 1e-6,
            max_iters: 50_000,
            initial_step: 0.1,
            max_step: 10.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            min_step: 1e-14,
            step_rule: StepRule::BarzilaiBorwein,
            motion: Motion::Normal,
            relax_every: 10,
            log_every: 100,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        let ok = self.grad_tol > 0.0
            && self.max_iters >= 1
            && self.initial_step > 0.0
            && self.max_step >= self.initial_step
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.sufficient_decrease > 0.0
            && self.sufficient_decrease < 1.0
            && self.min_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("bad solver options {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Converged,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub stop: StopReason,
    /// Number of accepted steps.
    pub iterations: usize,
    pub initial_area: f64,
    pub final_area: f64,
    pub final_grad_sup: f64,
    /// Area after each accepted step, starting with the initial area.
    pub area_history: Vec<f64>,
}

impl MinimizeReport {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    /// True when no accepted step increased the area.
    pub fn is_monotone(&self) -> bool {
        self.area_history.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Projected gradient descent with backtracking (Armijo) line search.
///
/// Each trial moves interior vertices against the tangential gradient and
/// renormalizes them onto the sphere; boundary vertices never move.
pub fn minimize(mesh: &TriMesh, opts: &SolverOptions) -> Result<(TriMesh, MinimizeReport)> {
    opts.validate()?;
    let mut x: Vec<Point4> = mesh.vertices().to_vec();
    let mut current_area = area(mesh);
    let mut grad = descent_field(mesh, &x, opts.motion);
    let mut grad_sup = sup_norm(&grad);
    let mut history = vec![current_area];
    let mut step = opts.initial_step;
    let mut previous: Option<(Vec<Point4>, Vec<Vector4<f64>>)> = None;
    let mut iterations = 0;
    let mut trial = x.clone();
    let neighbors = if opts.relax_every > 0 {
        vertex_neighbors(mesh)
    } else {
        Vec::new()
    };

    let stop = loop {
        if grad_sup < opts.grad_tol {
            break StopReason::Converged;
        }
        if iterations >= opts.max_iters {
            break StopReason::MaxIters;
        }
        let grad_sq: f64 = grad.iter().map(|g| g.norm_squared()).sum();
        let mut t = match (opts.step_rule, &previous) {
            (StepRule::BarzilaiBorwein, Some((px, pg))) => {
                let mut ss = 0.0;
                let mut sy = 0.0;
                for i in 0..x.len() {
                    let s = x[i].0 - px[i].0;
                    ss += s.norm_squared();
                    sy += s.dot(&(grad[i] - pg[i]));
                }
                if sy > 0.0 {
                    ss / sy
                } else {
                    step * 2.0
                }
            }
            (StepRule::Growth(factor), _) => step * factor,
            _ => step,
        }
        .clamp(opts.min_step, opts.max_step);

        let accepted = loop {
            for i in 0..x.len() {
                trial[i] = if mesh.is_boundary(i) {
                    x[i]
                } else {
                    normalize(x[i].0 - grad[i] * t)?
                };
            }
            let change = area_change(mesh, &x, &trial);
            if change <= -opts.sufficient_decrease * t * grad_sq {
                break Some((current_area + change).min(current_area));
            }
            t *= opts.shrink;
            if t < opts.min_step {
                break None;
            }
        };
        let Some(new_area) = accepted else {
            debug!("line search stalled: gradsup={grad_sup:e}");
            return Err(Error::LineSearchStalled {
                iter: iterations,
                area: current_area,
            });
        };
        step = t;
        let old_x = std::mem::replace(&mut x, trial.clone());
        let new_grad = descent_field(mesh, &x, opts.motion);
        let old_grad = std::mem::replace(&mut grad, new_grad);
        previous = Some((old_x, old_grad));
        current_area = new_area;
        grad_sup = sup_norm(&grad);
        history.push(current_area);
        iterations += 1;
        if opts.relax_every > 0 && iterations % opts.relax_every == 0 {
            if let Some(relaxed_area) =
                relax(mesh, &neighbors, &mut x, &mut trial, current_area)?
            {
                current_area = relaxed_area;
                history.push(current_area);
                grad = descent_field(mesh, &x, opts.motion);
                grad_sup = sup_norm(&grad);
                previous = None;
            }
        }
        if opts.log_every > 0 && iterations % opts.log_every == 0 {
            info!("iter={iterations} area={current_area} gradsup={grad_sup:e}");
        }
    };

    let mut out = mesh.clone();
    out.set_vertices(x);
    let report = MinimizeReport {
        stop,
        iterations,
        initial_area: history[0],
        final_area: current_area,
        final_grad_sup: grad_sup,
        area_history: history,
    };
    Ok((out, report))
}

fn vertex_neighbors(mesh: &TriMesh) -> Vec<Vec<usize>> {
    let mut neighbors = vec![Vec::new(); mesh.vertex_count()];
    for &[a, b, c] in mesh.triangles() {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
        list.dedup();
    }
    neighbors
}

/// Umbrella smoothing restricted to the surface: each interior vertex moves
/// towards the mean of its neighbours, with the normal and radial parts of
/// that move removed. The largest of a few damped steps that does not
/// increase the area is applied; returns the new area, or `None` if no
/// step qualified.
fn relax(
    mesh: &TriMesh,
    neighbors: &[Vec<usize>],
    x: &mut [Point4],
    trial: &mut [Point4],
    current_area: f64,
) -> Result<Option<f64>> {
    let normals = vertex_normals(mesh, x);
    let shift: Vec<Vector4<f64>> = (0..x.len())
        .map(|i| {
            if mesh.is_boundary(i) || neighbors[i].is_empty() {
                return Vector4::zeros();
            }
            let p = x[i].0;
            let mean = neighbors[i].iter().map(|&j| x[j].0).sum::<Vector4<f64>>()
                / neighbors[i].len() as f64;
            let mut d = mean - p;
            d -= p * d.dot(&p);
            d -= normals[i] * d.dot(&normals[i]);
            d
        })
        .collect();
    let mut s = 0.5;
    for _ in 0..6 {
        for i in 0..x.len() {
            trial[i] = if mesh.is_boundary(i) {
                x[i]
            } else {
                normalize(x[i].0 + shift[i] * s)?
            };
        }
        let change = area_change(mesh, x, trial);
        if change <= 0.0 {
            x.copy_from_slice(trial);
            return Ok(Some((current_area + change).min(current_area)));
        }
        s *= 0.5;
    }
    Ok(None)
}

/// 1→4 subdivision; new vertices at geodesic edge midpoints.
///
/// Midpoints of boundary edges are placed on the frame edge at the averaged
/// arc parameter, so boundary parametrization stays uniform.
pub fn refine(mesh: &TriMesh) -> Result<TriMesh> {
    let incidence: HashMap<[usize; 2], usize> = mesh.edge_incidence().into_iter().collect();
    let mut vertices = mesh.vertices().to_vec();
    let mut params: Vec<Option<BoundaryParam>> =
        (0..mesh.vertex_count()).map(|i| mesh.boundary_param(i)).collect();
    let mut flags = mesh.boundary_flags().to_vec();
    let mut midpoint: HashMap<[usize; 2], usize> = HashMap::new();

    let mut mid = |a: usize, b: usize| -> Result<usize> {
        let key = [a.min(b), a.max(b)];
        if let Some(&m) = midpoint.get(&key) {
            return Ok(m);
        }
        let on_boundary = incidence.get(&key) == Some(&1) && flags[a] && flags[b];
        let framed = match (mesh.frame(), on_boundary) {
            (Some(frame), true) => params[a]
                .zip(params[b])
                .and_then(|(pa, pb)| BoundaryParam::midpoint(&pa, &pb))
                .map(|bp| (frame.edge_point(bp.edge as usize, bp.t), bp)),
            _ => None,
        };
        let (point, param) = match framed {
            Some((p, bp)) => (p, Some(bp)),
            None => (geodesic(&vertices[a], &vertices[b], 0.5)?, None),
        };
        vertices.push(point);
        params.push(param);
        flags.push(on_boundary);
        midpoint.insert(key, vertices.len() - 1);
        Ok(vertices.len() - 1)
    };

    let mut triangles = Vec::with_capacity(4 * mesh.triangles().len());
    for &[a, b, c] in mesh.triangles() {
        let ab = mid(a, b)?;
        let bc = mid(b, c)?;
        let ca = mid(c, a)?;
        triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
    }
    match mesh.frame() {
        Some(frame) => TriMesh::with_frame(vertices, triangles, params, *frame),
        None => TriMesh::with_boundary_flags(vertices, triangles, flags),
    }
}

/// True iff every vertex lies in tile `idx` up to a wall tolerance of `1e-7`.
pub fn containment_check(params: &LawsonParams, mesh: &TriMesh, idx: TileIndex) -> bool {
    mesh.vertices()
        .iter()
        .all(|v| tile_contains(params, idx, v, 1e-7))
}

/// Discrete Plateau solution for `Γ_{0,0}`: Coons start, then alternate
/// minimize and refine. Returns the finest disk and one report per level.
pub fn solve_fundamental_disk(
    params: &LawsonParams,
    n: usize,
    refinements: usize,
    opts: &SolverOptions,
) -> Result<(TriMesh, Vec<MinimizeReport>)> {
    let quad = crate::tiling::quadrilateral(params, TileIndex { j: 0, l: 0 });
    let mut mesh = coons_initial_mesh(&quad, n)?;
    let mut reports = Vec::with_capacity(refinements + 1);
    for level in 0..=refinements {
        if level > 0 {
            mesh = refine(&mesh)?;
        }
        let (solved, report) = minimize(&mesh, opts)?;
        info!(
            "level {level}: {} triangles, area {} after {} iterations ({:?})",
            solved.triangles().len(),
            report.final_area,
            report.iterations,
            report.stop
        );
        mesh = solved;
        reports.push(report);
    }
    Ok((mesh, reports))
}
