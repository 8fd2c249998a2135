//! Closed meshes with known curvature, used as oracles.

use std::collections::HashMap;

use nalgebra::{Vector3, Vector4};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::sphere::{normalize, Point4};

/// Clifford torus `S¹(1/√2) × S¹(1/√2)` sampled on an `n × n` product grid.
pub fn clifford_torus(n: usize) -> Result<TriMesh> {
    if n < 3 {
        return Err(Error::InvalidMesh("torus grid needs n >= 3".into()));
    }
    let h = std::f64::consts::TAU / n as f64;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut vertices = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (u, v) = (i as f64 * h, j as f64 * h);
            vertices.push(Point4::new(s * u.cos(), s * u.sin(), s * v.cos(), s * v.sin()));
        }
    }
    let index = |i: usize, j: usize| (j % n) * n + (i % n);
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (index(i, j), index(i + 1, j), index(i + 1, j + 1), index(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    TriMesh::new(vertices, triangles)
}

/// Geodesic sphere of radius `r` about `(1, 0, 0, 0)`.
///
/// The unit 2-sphere is sampled by an icosahedron subdivided `level` times
/// (`10·4^level + 2` vertices) and placed at `(cos r, sin r · p)`.
pub fn geodesic_sphere(r: f64, level: u32) -> Result<TriMesh> {
    if !(r > 0.0 && r < std::f64::consts::PI) {
        return Err(Error::InvalidMesh(format!("sphere radius {r} outside (0, π)")));
    }
    let (points, triangles) = icosphere(level);
    let (c, s) = (r.cos(), r.sin());
    let vertices = points
        .iter()
        .map(|p| normalize(Vector4::new(c, s * p.x, s * p.y, s * p.z)))
        .collect::<Result<Vec<_>>>()?;
    TriMesh::new(vertices, triangles)
}

/// Totally geodesic 2-sphere `x0 = 0`.
pub fn great_sphere(level: u32) -> Result<TriMesh> {
    geodesic_sphere(std::f64::consts::FRAC_PI_2, level)
}

fn icosphere(level: u32) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut points: Vec<Vector3<f64>> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<[usize; 2], usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, points: &mut Vec<Vector3<f64>>| {
            *cache.entry([a.min(b), a.max(b)]).or_insert_with(|| {
                points.push((points[a] + points[b]).normalize());
                points.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut points);
            let bc = mid(b, c, &mut points);
            let ca = mid(c, a, &mut points);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (points, faces)
}
