//! Mesh file formats.
//!
//! OBJ output shows the surface in ordinary 3-space by stereographic
//! projection from the pole `(0, 0, 0, −1)`. The raw format keeps all four
//! coordinates:
//!
//! ```text
//! # comment
//! v4 x0 x1 x2 x3
//! f i j k
//! ```
//!
//! with 1-based face indices. Coordinates are written in shortest round-trip
//! form, so writing and reading back reproduces every bit.

use std::fmt::Write as _;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::sphere::Point4;

/// Vertices closer than this to the projection pole are refused.
pub const POLE_GUARD: f64 = 1e-6;

/// Largest distance from the unit sphere the raw reader accepts.
pub const RAW_UNIT_TOL: f64 = 1e-9;

pub fn pole() -> Point4 {
    Point4::new(0.0, 0.0, 0.0, -1.0)
}

/// `(x0, x1, x2) / (1 + x3)`.
pub fn stereographic(p: &Point4) -> Vector3<f64> {
    let c = p.coords();
    Vector3::new(c[0], c[1], c[2]) / (1.0 + c[3])
}

/// Wavefront OBJ text of the stereographic image of `mesh`.
pub fn obj_string(mesh: &TriMesh) -> Result<String> {
    let pole = pole();
    let mut out = String::new();
    out.push_str("# stereographic projection from (0, 0, 0, -1)\n");
    for (i, v) in mesh.vertices().iter().enumerate() {
        let distance = v.distance(&pole);
        if distance < POLE_GUARD {
            return Err(Error::PoleProximity {
                vertex: i,
                distance,
            });
        }
        let x = stereographic(v);
        let _ = writeln!(out, "v {} {} {}", x.x, x.y, x.z);
    }
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    Ok(out)
}

/// Raw text of `mesh`, exact in every coordinate.
pub fn raw_string(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        let c = v.coords();
        let _ = writeln!(out, "v4 {} {} {} {}", c[0], c[1], c[2], c[3]);
    }
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    out
}

/// Read the raw format. Any malformed line is reported with its 1-based number.
pub fn parse_raw(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, [u64; 3])> = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line_no = number + 1;
        let fail = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        match fields.next() {
            Some("v4") => {
                let mut c = [0.0; 4];
                for slot in &mut c {
                    let field = fields.next().ok_or_else(|| fail("v4 needs 4 coordinates".into()))?;
                    let x: f64 = field
                        .parse()
                        .map_err(|_| fail(format!("bad coordinate {field:?}")))?;
                    if !x.is_finite() {
                        return Err(fail(format!("non-finite coordinate {field:?}")));
                    }
                    *slot = x;
                }
                if fields.next().is_some() {
                    return Err(fail("v4 takes exactly 4 coordinates".into()));
                }
                let p = Point4::new(c[0], c[1], c[2], c[3]);
                if (p.norm() - 1.0).abs() > RAW_UNIT_TOL {
                    return Err(fail(format!("vertex has norm {}, not 1", p.norm())));
                }
                vertices.push(p);
            }
            Some("f") => {
                let mut idx = [0u64; 3];
                for slot in &mut idx {
                    let field = fields.next().ok_or_else(|| fail("f needs 3 indices".into()))?;
                    *slot = field
                        .parse()
                        .map_err(|_| fail(format!("bad index {field:?}")))?;
                }
                if fields.next().is_some() {
                    return Err(fail("f takes exactly 3 indices".into()));
                }
                faces.push((line_no, idx));
            }
            Some(other) => return Err(fail(format!("unknown record {other:?}"))),
            None => unreachable!("content is non-empty"),
        }
    }
    let n = vertices.len() as u64;
    let mut triangles = Vec::with_capacity(faces.len());
    for (line, idx) in faces {
        if idx.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::Parse {
                line,
                message: format!("face index out of range 1..={n}"),
            });
        }
        if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
            return Err(Error::Parse {
                line,
                message: "face repeats a vertex".into(),
            });
        }
        triangles.push(idx.map(|i| (i - 1) as usize));
    }
    TriMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::geodesic_sphere;

    #[test]
    fn raw_round_trip_is_exact() {
        let mesh = geodesic_sphere(0.7, 2).unwrap();
        let text = raw_string(&mesh);
        let back = parse_raw(&text).unwrap();
        assert_eq!(back.triangles(), mesh.triangles());
        for (a, b) in back.vertices().iter().zip(mesh.vertices()) {
            for i in 0..4 {
                assert_eq!(a.coords()[i].to_bits(), b.coords()[i].to_bits());
            }
        }
        assert_eq!(raw_string(&back), text);
    }

    #[test]
    fn raw_rejections() {
        let good = "v4 1 0 0 0\nv4 0 1 0 0\nv4 0 0 1 0\nf 1 2 3\n";
        assert!(parse_raw(good).is_ok());
        assert!(parse_raw("# only a comment\n\n").unwrap().triangles().is_empty());
        let cases = [
            ("v4 1 0 0\n", 1),
            ("v4 1 0 0 0 0\n", 1),
            ("v4 NaN 0 0 0\n", 1),
            ("v4 inf 0 0 0\n", 1),
            ("v4 2 0 0 0\n", 1),
            ("v4 1 0 0 0\nf 1 1 1\n", 2),
            ("v4 1 0 0 0\nf 0 1 1\n", 2),
            ("v4 1 0 0 0\nf 1 2 3\n", 2),
            ("v4 1 0 0 0\nf 1 2 -3\n", 2),
            ("vt 0 0\n", 1),
            ("v4 1 0 0 0\n\nf 1 2\n", 3),
        ];
        for (text, line) in cases {
            match parse_raw(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn obj_projection() {
        let mesh = geodesic_sphere(0.5, 1).unwrap();
        let text = obj_string(&mesh).unwrap();
        assert!(text.starts_with("# stereographic"));
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), mesh.vertex_count());
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), mesh.triangles().len());
        // e0 projects to (1, 0, 0); the pole itself is refused.
        let x = stereographic(&Point4::basis(0));
        assert!((x - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        let at_pole = TriMesh::new(
            vec![Point4::basis(0), Point4::basis(1), pole()],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(
            obj_string(&at_pole),
            Err(Error::PoleProximity { vertex: 2, .. })
        ));
    }
}
