//! Whole-surface checks on small builds.

use std::sync::OnceLock;

use lawson::assembly::{orbit_mesh, weld};
use lawson::energy::willmore_energy;
use lawson::io::obj_string;
use lawson::pipeline::{build_surface, circle_coverage, max_edge_length, view_rotation, BuildConfig, Surface};
use lawson::plateau::{area, coons_initial_mesh, minimize, refine, SolverOptions};
use lawson::symmetry::is_invariant;
use lawson::tiling::{quadrilateral, Quad, TileIndex};
use lawson::{Error, LawsonParams, TOL};

fn params(m: u32, k: u32) -> LawsonParams {
    LawsonParams::new(m, k).unwrap()
}

/// (2,1) at n = 16 with one refinement, shared by the tests below.
fn genus_two() -> &'static Surface {
    static CELL: OnceLock<Surface> = OnceLock::new();
    CELL.get_or_init(|| {
        let config = BuildConfig { refinements: 1, ..BuildConfig::default() };
        build_surface(&params(2, 1), &config).unwrap()
    })
}

#[test]
fn welded_surface_is_invariant() {
    let s = genus_two();
    assert!(is_invariant(s.mesh(), &s.group, 10.0 * TOL.weld));
}

#[test]
fn total_area_is_order_times_disk() {
    let s = genus_two();
    let disk = area(&s.disk);
    let total = s.energy.area;
    let expected = s.group.order() as f64 * disk;
    assert!((total - expected).abs() < 1e-9 * expected, "{total} vs {expected}");
}

#[test]
fn surface_contains_fixed_circles() {
    let s = genus_two();
    let spacing = max_edge_length(s.mesh());
    let worst = circle_coverage(&s.params, s.mesh(), 64, 2.0 * spacing).unwrap();
    assert!(worst < spacing, "coverage {worst} vs spacing {spacing}");
}

#[test]
fn mean_curvature_is_small() {
    let s = genus_two();
    assert!(s.energy.sup_mean_curvature < 0.1, "{}", s.energy.sup_mean_curvature);
    assert!(s.energy.willmore >= s.energy.area);
    assert!((s.energy.willmore - s.energy.area) < 1e-4 * s.energy.area);
}

#[test]
fn reversed_corners_give_same_area() {
    let p = params(2, 1);
    let quad = quadrilateral(&p, TileIndex { j: 0, l: 0 });
    let mut corners = quad.vertices;
    corners.reverse();
    let solve = |q: &Quad| {
        let opts = SolverOptions::default();
        let mut mesh = coons_initial_mesh(q, 16).unwrap();
        mesh = minimize(&mesh, &opts).unwrap().0;
        mesh = refine(&mesh).unwrap();
        area(&minimize(&mesh, &opts).unwrap().0)
    };
    let forward = solve(&quad);
    let backward = solve(&Quad { vertices: corners });
    assert!((forward - backward).abs() < 1e-4, "{forward} vs {backward}");
}

#[test]
fn weld_survives_tighter_tolerance() {
    let s = genus_two();
    let copies = orbit_mesh(&s.group, &s.disk);
    let tight = weld(&copies, 1e-9).unwrap();
    assert_eq!(tight.mesh().vertex_count(), s.mesh().vertex_count());
    assert_eq!(tight.genus().unwrap(), 2);
}

#[test]
fn projection_needs_the_view_rotation() {
    // For odd k the pole (0,0,0,-1) is one of the corners P_j.
    let s = genus_two();
    assert!(matches!(obj_string(s.mesh()), Err(Error::PoleProximity { .. })));
    let rotated = s.mesh().transformed(&view_rotation(&s.params).unwrap());
    let text = obj_string(&rotated).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), s.mesh().triangles().len());
}

#[test]
fn mean_curvature_bound_at_finer_grid() {
    // n = 32 equivalent for (2,2): a second parameter pair through the energy path.
    let config = BuildConfig { refinements: 1, ..BuildConfig::default() };
    let s = build_surface(&params(2, 2), &config).unwrap();
    let report = willmore_energy(&s.closed, Some(&s.params)).unwrap();
    assert_eq!(report, s.energy);
    assert!(report.sup_mean_curvature < 0.1);
    assert_eq!(report.bound_satisfied, Some(true));
    assert_eq!(s.genus, 4);
}
