//! Points, great circles and halfturns of the unit 3-sphere in 4-space.

use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// A point of 4-space, usually on the unit sphere.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point4(pub Vector4<f64>);

impl Point4 {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Point4(Vector4::new(x0, x1, x2, x3))
    }

    /// Coordinate basis vector `e_{i+1}` (zero-based index).
    pub fn basis(i: usize) -> Self {
        let mut v = Vector4::zeros();
        v[i] = 1.0;
        Point4(v)
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn dot(&self, other: &Point4) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn distance(&self, other: &Point4) -> f64 {
        (self.0 - other.0).norm()
    }

    /// Great-circle distance to `other`; both points are assumed unit.
    pub fn arc_length(&self, other: &Point4) -> f64 {
        let dot = self.dot(other);
        let cross = (other.0 - self.0 * dot).norm();
        cross.atan2(dot)
    }

    pub fn antipode(&self) -> Point4 {
        Point4(-self.0)
    }
}

impl fmt::Debug for Point4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.coords();
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

impl From<Vector4<f64>> for Point4 {
    fn from(v: Vector4<f64>) -> Self {
        Point4(v)
    }
}

/// Rescale a raw vector onto the unit sphere.
pub fn normalize(v: Vector4<f64>) -> Result<Point4> {
    let norm = v.norm();
    if !(norm > TOL.degenerate) {
        return Err(Error::DegenerateVector { norm });
    }
    Ok(Point4(v / norm))
}

/// Spherical linear interpolation along the minor arc from `p` to `q`.
pub fn geodesic(p: &Point4, q: &Point4, t: f64) -> Result<Point4> {
    let dot = p.dot(q);
    if dot.abs() >= 1.0 - TOL.degenerate {
        return Err(Error::AntipodalOrEqual { dot });
    }
    if t == 0.0 {
        return Ok(*p);
    }
    if t == 1.0 {
        return Ok(*q);
    }
    let theta = p.arc_length(q);
    let s = theta.sin();
    let a = ((1.0 - t) * theta).sin() / s;
    let b = (t * theta).sin() / s;
    Ok(Point4(p.0 * a + q.0 * b))
}

/// Angle at `apex` between the geodesic arcs towards `a` and `b`.
pub fn vertex_angle(apex: &Point4, a: &Point4, b: &Point4) -> Result<f64> {
    for other in [a, b] {
        let dot = apex.dot(other);
        if dot.abs() >= 1.0 - TOL.degenerate {
            return Err(Error::AntipodalOrEqual { dot });
        }
    }
    let ta = a.0 - apex.0 * apex.dot(a);
    let tb = b.0 - apex.0 * apex.dot(b);
    let ta_len = ta.norm();
    let along = tb.dot(&ta) / ta_len;
    let rejection = (tb - ta * (along / ta_len)).norm();
    Ok(rejection.atan2(along))
}

/// A great circle, stored as an orthonormal pair spanning its 2-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreatCircle {
    u: Point4,
    v: Point4,
}

impl GreatCircle {
    /// Circle through two independent directions; Gram–Schmidt is applied.
    pub fn through(a: &Point4, b: &Point4) -> Result<Self> {
        let u = normalize(a.0)?;
        let v = normalize(b.0 - u.0 * u.dot(b))?;
        Ok(GreatCircle { u, v })
    }

    /// Circle from a pair that must already be orthonormal.
    pub fn from_orthonormal(u: Point4, v: Point4) -> Result<Self> {
        let tol = TOL.unit * 10.0;
        if (u.norm() - 1.0).abs() > tol || (v.norm() - 1.0).abs() > tol {
            return Err(Error::InvalidCircle(format!(
                "norms {} and {}",
                u.norm(),
                v.norm()
            )));
        }
        if u.dot(&v).abs() > tol {
            return Err(Error::InvalidCircle(format!("u·v = {:e}", u.dot(&v))));
        }
        Ok(GreatCircle { u, v })
    }

    pub fn u(&self) -> &Point4 {
        &self.u
    }

    pub fn v(&self) -> &Point4 {
        &self.v
    }

    /// The point `cos t · u + sin t · v`.
    pub fn point(&self, t: f64) -> Point4 {
        Point4(self.u.0 * t.cos() + self.v.0 * t.sin())
    }

    /// Orthogonal projector onto the spanning plane.
    pub fn projector(&self) -> Matrix4<f64> {
        self.u.0 * self.u.0.transpose() + self.v.0 * self.v.0.transpose()
    }

    /// Distance in 4-space from `p` to the spanning plane.
    pub fn plane_distance(&self, p: &Point4) -> f64 {
        (p.0 - self.projector() * p.0).norm()
    }

    /// Unit tangent of the circle at a point `p` on it.
    pub fn tangent_at(&self, p: &Point4) -> Result<Point4> {
        let cu = p.dot(&self.u);
        let cv = p.dot(&self.v);
        normalize(self.v.0 * cu - self.u.0 * cv)
    }
}

/// Rotation by π about `circle`: `2P − I` with `P` the projector onto its plane.
pub fn halfturn(circle: &GreatCircle) -> Rotation4 {
    Rotation4(circle.projector() * 2.0 - Matrix4::identity())
}

/// An element of SO(4).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rotation4(Matrix4<f64>);

impl Rotation4 {
    pub fn identity() -> Self {
        Rotation4(Matrix4::identity())
    }

    /// Checks `mᵀm = I` and `det m = 1` within the orthogonality tolerance.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotOrthogonal("non-finite entry".into()));
        }
        let defect = (m.transpose() * m - Matrix4::identity()).norm();
        if defect > TOL.orth {
            return Err(Error::NotOrthogonal(format!("|mᵀm − I| = {defect:e}")));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > TOL.orth {
            return Err(Error::NotOrthogonal(format!("det = {det}")));
        }
        Ok(Rotation4(m))
    }

    /// Build from 16 row-major entries.
    pub fn from_row_slice(entries: &[f64]) -> Result<Self> {
        if entries.len() != 16 {
            return Err(Error::NotOrthogonal(format!(
                "expected 16 entries, got {}",
                entries.len()
            )));
        }
        Self::new(Matrix4::from_row_slice(entries))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn to_row_major(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[4 * r + c] = self.0[(r, c)];
            }
        }
        out
    }

    pub fn apply(&self, p: &Point4) -> Point4 {
        Point4(self.0 * p.0)
    }

    pub fn inverse(&self) -> Rotation4 {
        Rotation4(self.0.transpose())
    }

    pub fn frobenius_distance(&self, other: &Rotation4) -> f64 {
        (self.0 - other.0).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

impl Mul for Rotation4 {
    type Output = Rotation4;

    fn mul(self, rhs: Rotation4) -> Rotation4 {
        Rotation4(self.0 * rhs.0)
    }
}

impl Mul for &Rotation4 {
    type Output = Rotation4;

    fn mul(self, rhs: &Rotation4) -> Rotation4 {
        Rotation4(self.0 * rhs.0)
    }
}

/// Vector orthogonal to `u`, `v` and `w` whose length is the volume of the
/// parallelepiped they span (generalized cross product in 4-space).
pub fn cross3(u: &Vector4<f64>, v: &Vector4<f64>, w: &Vector4<f64>) -> Vector4<f64> {
    let minor = |a: usize, b: usize, c: usize| {
        u[a] * (v[b] * w[c] - v[c] * w[b]) - u[b] * (v[a] * w[c] - v[c] * w[a])
            + u[c] * (v[a] * w[b] - v[b] * w[a])
    };
    Vector4::new(
        -minor(1, 2, 3),
        minor(0, 2, 3),
        -minor(0, 1, 3),
        minor(0, 1, 2),
    )
}

/// Rotation in the plane of `from` and `to` carrying `from` onto `to`,
/// fixing the orthogonal complement of that plane.
pub fn rotation_between(from: &Point4, to: &Point4) -> Result<Rotation4> {
    let cos = from.dot(to);
    if cos >= 1.0 - TOL.unit {
        return Ok(Rotation4::identity());
    }
    if cos <= -1.0 + TOL.degenerate {
        return Err(Error::AntipodalOrEqual { dot: cos });
    }
    let circle = GreatCircle::through(from, to)?;
    let (u, v) = (circle.u.0, circle.v.0);
    let sin = (1.0 - cos * cos).sqrt();
    let rot = Matrix4::identity() + (v * u.transpose() - u * v.transpose()) * sin
        + (u * u.transpose() + v * v.transpose()) * (cos - 1.0);
    Rotation4::new(rot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};

    fn close(a: &Point4, b: &Point4, tol: f64) -> bool {
        a.distance(b) < tol
    }

    #[test]
    fn normalize_examples() {
        let p = normalize(Vector4::new(2.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(close(&p, &Point4::new(1.0, 0.0, 0.0, 0.0), 1e-15));
        let p = normalize(Vector4::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(close(&p, &Point4::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0), 1e-15));
        assert!(matches!(
            normalize(Vector4::zeros()),
            Err(Error::DegenerateVector { .. })
        ));
        assert!(normalize(Vector4::new(f64::NAN, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn geodesic_examples() {
        let p = Point4::basis(2);
        let q = Point4::basis(0);
        let mid = geodesic(&p, &q, 0.5).unwrap();
        assert!(close(&mid, &Point4::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0), 1e-15));
        assert_eq!(geodesic(&p, &q, 0.0).unwrap(), p);
        assert_eq!(geodesic(&p, &q, 1.0).unwrap(), q);
        let third = geodesic(&p, &q, 1.0 / 3.0).unwrap();
        assert!(close(&third, &Point4::new(0.5, 0.0, 3f64.sqrt() / 2.0, 0.0), 1e-15));
        assert!(matches!(
            geodesic(&p, &p.antipode(), 0.5),
            Err(Error::AntipodalOrEqual { .. })
        ));
        assert!(geodesic(&p, &p, 0.5).is_err());
    }

    #[test]
    fn halfturn_coordinate_planes() {
        let e = Point4::basis;
        let r = halfturn(&GreatCircle::through(&e(0), &e(1)).unwrap());
        assert_abs_diff_eq!(
            *r.matrix(),
            Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0)),
            epsilon = 1e-15
        );
        let r = halfturn(&GreatCircle::through(&e(0), &e(2)).unwrap());
        assert_abs_diff_eq!(
            *r.matrix(),
            Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, 1.0, -1.0)),
            epsilon = 1e-15
        );
    }

    #[test]
    fn halfturn_diagonal_plane() {
        let d = Point4::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0);
        let r = halfturn(&GreatCircle::from_orthonormal(d, Point4::basis(2)).unwrap());
        #[rustfmt::skip]
        let expected = Matrix4::new(
            0.0, 1.0, 0.0, 0.0,
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, -1.0,
        );
        assert_abs_diff_eq!(*r.matrix(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(r.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_orthonormal_pair_is_rejected() {
        let a = Point4::basis(0);
        let b = Point4::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0);
        assert!(matches!(
            GreatCircle::from_orthonormal(a, b),
            Err(Error::InvalidCircle(_))
        ));
        assert!(GreatCircle::from_orthonormal(a, Point4::new(0.0, 2.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn vertex_angle_examples() {
        let e = Point4::basis;
        assert_abs_diff_eq!(vertex_angle(&e(2), &e(0), &e(1)).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        // P_0 with Q_0, Q_1 at (m, k) = (2, 1)
        let q1 = Point4::new(0.5, 3f64.sqrt() / 2.0, 0.0, 0.0);
        assert_abs_diff_eq!(vertex_angle(&e(2), &e(0), &q1).unwrap(), FRAC_PI_3, epsilon = 1e-15);
        assert_abs_diff_eq!(vertex_angle(&e(0), &e(2), &e(3)).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert!(vertex_angle(&e(0), &e(0), &e(1)).is_err());
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation4::new(Matrix4::identity() * 2.0).is_err());
        let reflection = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
        assert!(matches!(Rotation4::new(reflection), Err(Error::NotOrthogonal(_))));
        assert!(Rotation4::from_row_slice(&[1.0; 3]).is_err());
    }

    #[test]
    fn cross3_is_orthogonal_and_sized() {
        let u = Vector4::new(0.3, -1.2, 0.5, 2.0);
        let v = Vector4::new(1.1, 0.4, -0.7, 0.2);
        let w = Vector4::new(-0.6, 0.9, 1.3, -0.4);
        let n = cross3(&u, &v, &w);
        for x in [u, v, w] {
            assert_abs_diff_eq!(n.dot(&x), 0.0, epsilon = 1e-12);
        }
        // |n|² equals the Gram determinant of (u, v, w)
        let m = nalgebra::Matrix4x3::from_columns(&[u, v, w]);
        assert_abs_diff_eq!(n.norm_squared(), (m.transpose() * m).determinant(), epsilon = 1e-10);
        let e = |i| Point4::basis(i).0;
        assert_abs_diff_eq!(cross3(&e(0), &e(1), &e(2)), e(3), epsilon = 0.0);
    }

    #[test]
    fn rotation_between_maps_points() {
        let a = normalize(Vector4::new(0.3, -0.2, 0.9, 0.1)).unwrap();
        let b = normalize(Vector4::new(-0.5, 0.4, 0.1, 0.7)).unwrap();
        let r = rotation_between(&a, &b).unwrap();
        assert!(close(&r.apply(&a), &b, 1e-12));
    }
}
