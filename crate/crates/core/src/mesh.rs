//! Indexed triangle meshes with vertices on the 3-sphere.

use std::collections::HashMap;

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{cross3, Point4, Rotation4};
use crate::tiling::Quad;
use crate::tolerance::TOL;

/// Position of a boundary vertex on the frame quadrilateral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParam {
    /// Quad edge, 0..4.
    pub edge: u8,
    /// Arc parameter along the edge, in `[0, 1)`. Corners use `t = 0` on the outgoing edge.
    pub t: f64,
}

impl BoundaryParam {
    /// The (edge, t) descriptions of this point; a corner lies on two edges.
    fn placements(&self) -> impl Iterator<Item = (u8, f64)> {
        let corner = (self.t == 0.0).then_some(((self.edge + 3) % 4, 1.0));
        std::iter::once((self.edge, self.t)).chain(corner)
    }

    /// Midpoint parameter of two boundary points sharing an edge.
    pub fn midpoint(a: &BoundaryParam, b: &BoundaryParam) -> Option<BoundaryParam> {
        for (ea, ta) in a.placements() {
            for (eb, tb) in b.placements() {
                if ea == eb {
                    return Some(BoundaryParam {
                        edge: ea,
                        t: 0.5 * (ta + tb),
                    });
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point4>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<Option<BoundaryParam>>,
    boundary_flags: Vec<bool>,
    frame: Option<Quad>,
}

impl TriMesh {
    /// Mesh without boundary bookkeeping.
    pub fn new(vertices: Vec<Point4>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        Self::build(vertices, triangles, vec![None; n], vec![false; n], None)
    }

    /// Mesh whose boundary vertices sit on the edges of `frame`.
    pub fn with_frame(
        vertices: Vec<Point4>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<Option<BoundaryParam>>,
        frame: Quad,
    ) -> Result<Self> {
        let flags = boundary.iter().map(Option::is_some).collect();
        Self::build(vertices, triangles, boundary, flags, Some(frame))
    }

    /// Mesh with explicit boundary flags but no frame parametrization.
    pub fn with_boundary_flags(
        vertices: Vec<Point4>,
        triangles: Vec<[usize; 3]>,
        flags: Vec<bool>,
    ) -> Result<Self> {
        let n = vertices.len();
        Self::build(vertices, triangles, vec![None; n], flags, None)
    }

    fn build(
        vertices: Vec<Point4>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<Option<BoundaryParam>>,
        boundary_flags: Vec<bool>,
        frame: Option<Quad>,
    ) -> Result<Self> {
        let n = vertices.len();
        if boundary.len() != n || boundary_flags.len() != n {
            return Err(Error::InvalidMesh("per-vertex arrays have wrong length".into()));
        }
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(format!("triangle {i} has an index out of range")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidMesh(format!("triangle {i} repeats a vertex")));
            }
        }
        Ok(TriMesh {
            vertices,
            triangles,
            boundary,
            boundary_flags,
            frame,
        })
    }

    pub fn vertices(&self) -> &[Point4] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary_flags[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary_flags
    }

    pub fn boundary_param(&self, v: usize) -> Option<BoundaryParam> {
        self.boundary[v]
    }

    pub fn frame(&self) -> Option<&Quad> {
        self.frame.as_ref()
    }

    /// Replace positions, keeping connectivity and boundary data.
    pub(crate) fn set_vertices(&mut self, vertices: Vec<Point4>) {
        debug_assert_eq!(vertices.len(), self.vertices.len());
        self.vertices = vertices;
    }

    /// Largest `| |v| − 1 |` over all vertices.
    pub fn unit_defect(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_unit(&self, tol: f64) -> Result<()> {
        match self
            .vertices
            .iter()
            .position(|v| !((v.norm() - 1.0).abs() <= tol))
        {
            Some(i) => Err(Error::InvalidMesh(format!(
                "vertex {i} has norm {}",
                self.vertices[i].norm()
            ))),
            None => Ok(()),
        }
    }

    /// Largest distance of a boundary vertex from its prescribed frame position.
    pub fn boundary_defect(&self) -> f64 {
        let Some(frame) = &self.frame else { return 0.0 };
        self.boundary
            .iter()
            .zip(&self.vertices)
            .filter_map(|(b, v)| b.map(|b| frame.edge_point(b.edge as usize, b.t).distance(v)))
            .fold(0.0, f64::max)
    }

    /// Image of the mesh under `r`; the frame is transformed along with it.
    pub fn transformed(&self, r: &Rotation4) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| r.apply(v)).collect(),
            triangles: self.triangles.clone(),
            boundary: self.boundary.clone(),
            boundary_flags: self.boundary_flags.clone(),
            frame: self.frame.map(|q| Quad {
                vertices: q.vertices.map(|v| r.apply(&v)),
            }),
        }
    }

    /// Same mesh with every triangle's winding reversed.
    pub fn flipped(&self) -> TriMesh {
        let mut out = self.clone();
        for t in &mut out.triangles {
            t.swap(1, 2);
        }
        out
    }

    /// Undirected edges with their incident triangle counts, in first-seen order.
    pub fn edge_incidence(&self) -> Vec<([usize; 2], usize)> {
        let mut slot: HashMap<[usize; 2], usize> = HashMap::new();
        let mut out: Vec<([usize; 2], usize)> = Vec::new();
        for t in &self.triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                match slot.get(&key) {
                    Some(&i) => out[i].1 += 1,
                    None => {
                        slot.insert(key, out.len());
                        out.push((key, 1));
                    }
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edge_incidence().len()
    }

    /// `V − E + F` over referenced vertices.
    pub fn euler_characteristic(&self) -> i64 {
        let mut used = vec![false; self.vertices.len()];
        for t in &self.triangles {
            for &v in t {
                used[v] = true;
            }
        }
        let v = used.iter().filter(|&&u| u).count() as i64;
        v - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Raw coordinates of triangle `t`.
    pub fn corners(&self, t: usize) -> [Vector4<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a].0, self.vertices[b].0, self.vertices[c].0]
    }
}

/// Chordal area of the triangle `abc` in 4-space.
pub fn triangle_area(a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>) -> f64 {
    let u = b - a;
    let v = c - a;
    let uu = u.norm_squared();
    let vv = v.norm_squared();
    let uv = u.dot(&v);
    0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
}

/// Area-weighted unit normals of the surface inside the tangent space of the sphere.
///
/// The normal of triangle `abc` seen from vertex `x` is orthogonal to `x`,
/// `b − a` and `c − a`; its sign follows the triangle winding. Vertices whose
/// incident normals cancel get a zero vector.
pub fn vertex_normals(mesh: &TriMesh, positions: &[Point4]) -> Vec<Vector4<f64>> {
    let mut normals = vec![Vector4::zeros(); positions.len()];
    for &[a, b, c] in mesh.triangles() {
        let (pa, pb, pc) = (positions[a].0, positions[b].0, positions[c].0);
        let (u, v) = (pb - pa, pc - pa);
        for i in [a, b, c] {
            normals[i] += cross3(&positions[i].0, &u, &v);
        }
    }
    for n in &mut normals {
        let len = n.norm();
        if len > f64::MIN_POSITIVE {
            *n /= len;
        }
    }
    normals
}

/// Default check that a mesh lies on the sphere.
pub fn check_on_sphere(mesh: &TriMesh) -> Result<()> {
    mesh.check_unit(TOL.unit * 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_triangles() {
        let v = vec![Point4::basis(0), Point4::basis(1), Point4::basis(2)];
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 3]]).is_err());
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 1]]).is_err());
        assert!(TriMesh::new(v, vec![[0, 1, 2]]).is_ok());
    }

    #[test]
    fn single_triangle_euler() {
        let v = vec![Point4::basis(0), Point4::basis(1), Point4::basis(2)];
        let mesh = TriMesh::new(v, vec![[0, 1, 2]]).unwrap();
        assert_eq!(mesh.euler_characteristic(), 1);
        assert_eq!(mesh.edge_count(), 3);
    }

    #[test]
    fn corner_midpoints() {
        let corner = BoundaryParam { edge: 1, t: 0.0 };
        let prev = BoundaryParam { edge: 0, t: 0.75 };
        let next = BoundaryParam { edge: 1, t: 0.25 };
        assert_eq!(
            BoundaryParam::midpoint(&corner, &prev),
            Some(BoundaryParam { edge: 0, t: 0.875 })
        );
        assert_eq!(
            BoundaryParam::midpoint(&corner, &next),
            Some(BoundaryParam { edge: 1, t: 0.125 })
        );
        let across = BoundaryParam { edge: 2, t: 0.5 };
        assert_eq!(BoundaryParam::midpoint(&prev, &across), None);
    }
}
