//! Discrete mean curvature and Willmore energy of meshes in the 3-sphere.
//!
//! The cotangent Laplacian of the coordinate functions approximates the mean
//! curvature vector in 4-space. Removing its component along the position
//! vector (the normal of the sphere) leaves the mean curvature inside the
//! sphere, and `W = area + Σ H² A_v` with barycentric vertex areas `A_v`.

use std::cmp::Ordering as CmpOrdering;
use std::f64::consts::PI;

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::assembly::ClosedMesh;
use crate::error::{Error, Result};
use crate::mesh::{triangle_area, vertex_normals, TriMesh};
use crate::symmetry::LawsonParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub area: f64,
    pub willmore: f64,
    pub sup_mean_curvature: f64,
    /// `4π(min(m,k) + 1)` when parameters were supplied.
    pub upper_bound: Option<f64>,
    /// Whether `area` is strictly below `upper_bound`.
    pub bound_satisfied: Option<bool>,
}

/// Mean curvature vectors in the tangent space of the sphere, and the
/// barycentric vertex areas.
///
/// A triangle whose doubled area is negligible next to its squared edge
/// lengths has no usable cotangents; its vertices report `ZeroMixedArea`.
pub fn mean_curvature_vectors(mesh: &TriMesh) -> Result<(Vec<Vector4<f64>>, Vec<f64>)> {
    let x = mesh.vertices();
    let mut laplace = vec![Vector4::zeros(); x.len()];
    let mut mixed = vec![0.0; x.len()];
    for &tri in mesh.triangles() {
        let p = tri.map(|v| x[v].0);
        let area = triangle_area(&p[0], &p[1], &p[2]);
        let scale = (0..3)
            .map(|i| (p[(i + 1) % 3] - p[i]).norm_squared())
            .fold(0.0, f64::max);
        if !(area > 1e-14 * scale) {
            return Err(Error::ZeroMixedArea { vertex: tri[0] });
        }
        for corner in 0..3 {
            let (i, j, o) = (corner, (corner + 1) % 3, (corner + 2) % 3);
            // cotangent of the angle at `o`, opposite the edge i–j
            let u = p[i] - p[o];
            let v = p[j] - p[o];
            let cot = u.dot(&v) / (2.0 * area);
            let d = p[j] - p[i];
            laplace[tri[i]] += d * cot;
            laplace[tri[j]] -= d * cot;
            mixed[tri[corner]] += area / 3.0;
        }
    }
    let mut vectors = Vec::with_capacity(x.len());
    for (i, (lap, a)) in laplace.iter().zip(&mixed).enumerate() {
        if !(*a > 0.0) {
            return Err(Error::ZeroMixedArea { vertex: i });
        }
        // Δx ≈ lap / (2A); the mean curvature vector in 4-space is half of it.
        let h4 = lap / (4.0 * a);
        let xi = x[i].0;
        vectors.push(h4 - xi * h4.dot(&xi));
    }
    Ok((vectors, mixed))
}

/// Signed mean curvature per vertex, measured along the vertex normal.
///
/// Values at boundary vertices of an open mesh are not meaningful.
pub fn mean_curvature(mesh: &ClosedMesh) -> Result<Vec<f64>> {
    signed_mean_curvature(mesh.mesh())
}

fn signed_mean_curvature(mesh: &TriMesh) -> Result<Vec<f64>> {
    let (vectors, _) = mean_curvature_vectors(mesh)?;
    let normals = vertex_normals(mesh, mesh.vertices());
    Ok(vectors.iter().zip(&normals).map(|(h, n)| h.dot(n)).collect())
}

/// Area, Willmore energy and the area bound when `params` is given.
pub fn willmore_energy(mesh: &ClosedMesh, params: Option<&LawsonParams>) -> Result<EnergyReport> {
    let m = mesh.mesh();
    let (vectors, mixed) = mean_curvature_vectors(m)?;
    let normals = vertex_normals(m, m.vertices());
    let area = crate::plateau::area(m);
    let mut integral = 0.0;
    let mut sup: f64 = 0.0;
    for ((h, n), a) in vectors.iter().zip(&normals).zip(&mixed) {
        let signed = h.dot(n);
        integral += signed * signed * a;
        sup = sup.max(signed.abs());
    }
    let upper_bound = params.map(area_upper_bound);
    Ok(EnergyReport {
        area,
        willmore: area + integral,
        sup_mean_curvature: sup,
        upper_bound,
        bound_satisfied: upper_bound.map(|b| area < b),
    })
}

/// `4π(min(m,k) + 1)`.
pub fn area_upper_bound(params: &LawsonParams) -> f64 {
    4.0 * PI * (params.k().min(params.m()) as f64 + 1.0)
}

/// Areas of one surface at successive refinement levels, coarse to fine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedAreas {
    pub params: LawsonParams,
    pub levels: Vec<f64>,
}

impl SolvedAreas {
    pub fn finest(&self) -> Option<f64> {
        self.levels.last().copied()
    }

    /// Change between the last two levels; infinite with fewer than two.
    pub fn error_bar(&self) -> f64 {
        match self.levels.as_slice() {
            [.., a, b] => (b - a).abs(),
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AreaOrdering {
    Greater,
    Less,
    Equal,
    /// The gap is within the combined error bar.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub first: LawsonParams,
    pub second: LawsonParams,
    pub first_area: f64,
    pub second_area: f64,
    pub gap: f64,
    pub error_bar: f64,
    pub ordering: AreaOrdering,
}

/// Order two solved surfaces by area, honest about discretization error.
///
/// Identical parameters compare `Equal`. Otherwise the ordering is only
/// reported when the gap exceeds the sum of both error bars.
pub fn compare_lawson(first: &SolvedAreas, second: &SolvedAreas) -> Comparison {
    let a = first.finest().unwrap_or(f64::NAN);
    let b = second.finest().unwrap_or(f64::NAN);
    let error_bar = first.error_bar() + second.error_bar();
    let gap = a - b;
    let ordering = if first.params == second.params {
        AreaOrdering::Equal
    } else if !(gap.abs() > error_bar) {
        AreaOrdering::Inconclusive
    } else {
        match gap.partial_cmp(&0.0) {
            Some(CmpOrdering::Greater) => AreaOrdering::Greater,
            Some(CmpOrdering::Less) => AreaOrdering::Less,
            _ => AreaOrdering::Inconclusive,
        }
    };
    Comparison {
        first: first.params,
        second: second.params,
        first_area: a,
        second_area: b,
        gap,
        error_bar,
        ordering,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plateau::raw_area_gradient;
    use crate::shapes::{clifford_torus, geodesic_sphere, great_sphere};
    use crate::sphere::Point4;

    fn closed(mesh: TriMesh) -> ClosedMesh {
        ClosedMesh::from_mesh(mesh).unwrap()
    }

    #[test]
    fn cotangent_form_equals_area_gradient() {
        // Both routes to the mean curvature vector: cotangent weights versus
        // the derivative of the area.
        let mesh = geodesic_sphere(0.8, 2).unwrap();
        let (vectors, mixed) = mean_curvature_vectors(&mesh).unwrap();
        let grad = raw_area_gradient(&mesh);
        for (i, x) in mesh.vertices().iter().enumerate() {
            let h4 = -grad[i] / (2.0 * mixed[i]);
            let h = h4 - x.0 * h4.dot(&x.0);
            assert!((h - vectors[i]).norm() < 1e-10 * (1.0 + h.norm()));
        }
    }

    #[test]
    fn clifford_torus_is_minimal() {
        for n in [8, 16, 32] {
            let report = willmore_energy(&closed(clifford_torus(n).unwrap()), None).unwrap();
            assert!(report.sup_mean_curvature < 1e-10, "n={n}");
            assert!((report.willmore - report.area).abs() < 1e-9);
        }
        let fine = willmore_energy(&closed(clifford_torus(128).unwrap()), None).unwrap();
        assert!((fine.area - 2.0 * PI * PI).abs() / (2.0 * PI * PI) < 1e-3);
    }

    #[test]
    fn geodesic_spheres_have_cot_r() {
        for r in [0.3, 0.6, 1.0] {
            let raw = geodesic_sphere(r, 5).unwrap();
            assert!(raw.vertex_count() > 10_000);
            let (_, mixed) = mean_curvature_vectors(&raw).unwrap();
            let mesh = closed(raw);
            let h = mean_curvature(&mesh).unwrap();
            let expected = 1.0 / r.tan();
            let rel = |v: f64| (v.abs() - expected).abs() / expected;
            let weighted = h.iter().zip(&mixed).map(|(v, a)| v.abs() * a).sum::<f64>()
                / mixed.iter().sum::<f64>();
            assert!(rel(weighted) < 0.05, "r={r}: mean {weighted} vs {expected}");
            // The first twelve vertices are the icosahedron's, of valence 5.
            // Barycentric areas misjudge their cells by a fixed fraction that
            // does not shrink with refinement; every other vertex is regular.
            for (i, v) in h.iter().enumerate() {
                let bound = if i < 12 { 0.15 } else { 0.05 };
                assert!(rel(*v) < bound, "r={r} vertex {i}: {v} vs {expected}");
            }
        }
    }

    #[test]
    fn great_sphere_energy_is_four_pi() {
        let report = willmore_energy(&closed(great_sphere(5).unwrap()), None).unwrap();
        assert!((report.willmore - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
        assert!(report.sup_mean_curvature < 1e-8);
        assert!(report.willmore >= report.area);
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let v = vec![
            Point4::basis(0),
            Point4::basis(1),
            Point4::basis(0),
            Point4::basis(2),
        ];
        let mesh = TriMesh::new(v, vec![[0, 1, 2], [0, 1, 3]]).unwrap();
        assert!(matches!(
            mean_curvature_vectors(&mesh),
            Err(Error::ZeroMixedArea { .. })
        ));
    }

    #[test]
    fn upper_bounds() {
        let p = |m, k| LawsonParams::new(m, k).unwrap();
        assert!((area_upper_bound(&p(2, 1)) - 8.0 * PI).abs() < 1e-12);
        assert!((area_upper_bound(&p(2, 2)) - 12.0 * PI).abs() < 1e-12);
        assert!((area_upper_bound(&p(1, 1)) - 8.0 * PI).abs() < 1e-12);
        assert!(2.0 * PI * PI < area_upper_bound(&p(1, 1)));
    }

    #[test]
    fn comparisons() {
        let p = |m, k| LawsonParams::new(m, k).unwrap();
        let a = SolvedAreas { params: p(2, 2), levels: vec![26.0, 26.9, 26.95] };
        let b = SolvedAreas { params: p(4, 1), levels: vec![23.0, 23.3, 23.32] };
        let c = compare_lawson(&a, &b);
        assert_eq!(c.ordering, AreaOrdering::Greater);
        assert!((c.error_bar - 0.07).abs() < 1e-9);
        assert_eq!(compare_lawson(&b, &a).ordering, AreaOrdering::Less);
        let close = SolvedAreas { params: p(4, 1), levels: vec![20.0, 26.94] };
        assert_eq!(compare_lawson(&a, &close).ordering, AreaOrdering::Inconclusive);
        assert_eq!(compare_lawson(&a, &a).ordering, AreaOrdering::Equal);
        let single = SolvedAreas { params: p(3, 1), levels: vec![22.8] };
        assert_eq!(compare_lawson(&single, &b).ordering, AreaOrdering::Inconclusive);
    }
}
