//! Vertex-based ground truth for the closed-form radii.
//!
//! Nothing here evaluates the unified radius formulas. Circumcenters and
//! incenters are found from the embedded vertices directly: linear algebra in
//! the plane and on the sphere, damped Newton root finding in the Klein
//! disk.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use thiserror::Error;

use crate::geometry::{
    klein_distance_unchecked, side_lengths_from_vertices, Geometry, GeometryError,
    Triangle, Vertices,
};

/// Residual tolerance for the hyperbolic root finders.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Iteration cap for the hyperbolic root finders.
pub const ROOT_MAX_ITER: usize = 500;
/// Smallest `min(a + b - c, ...) / (a + b + c)` the oracles accept. Below it
/// the side lengths measured from the vertices no longer pin down the radii
/// to 1e-8.
pub const MIN_RELATIVE_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("ill-conditioned triangle: {0}")]
    Conditioning(String),
    #[error("projection undefined: {0}")]
    ProjectionDomain(String),
    #[error("sampler rejected {attempts} consecutive candidates")]
    RejectionBudgetExceeded { attempts: usize },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A point in the model of one geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Plane(Vector2<f64>),
    Sphere(Vector3<f64>),
    Klein(Vector2<f64>),
}

impl Point {
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Plane(v) | Point::Klein(v) => vec![v.x, v.y],
            Point::Sphere(v) => vec![v.x, v.y, v.z],
        }
    }
}

/// A triangle with vertices in its model; `sides` is derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedTriangle {
    pub vertices: Vertices,
    pub sides: Triangle,
}

impl EmbeddedTriangle {
    pub fn new(vertices: Vertices) -> Result<Self, GeometryError> {
        let sides = side_lengths_from_vertices(&vertices)?;
        Ok(EmbeddedTriangle { vertices, sides })
    }

    pub fn kind(&self) -> Geometry {
        self.vertices.kind()
    }
}

/// A center together with `rho` of the matching radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterEstimate {
    pub center: Point,
    pub rho: f64,
}

/// Equidistant point of the three vertices.
pub fn circumcenter_oracle(e: &EmbeddedTriangle) -> Result<CenterEstimate, OracleError> {
    check_conditioning(&e.sides)?;
    match &e.vertices {
        Vertices::Plane(p) => {
            let center = plane_circumcenter(p)?;
            Ok(CenterEstimate { center: Point::Plane(center), rho: (center - p[0]).norm() })
        }
        Vertices::Sphere(v) => {
            let c = sphere_circumcenter(v)?;
            let rho = c.cross(&v[0]).norm() / c.dot(&v[0]);
            Ok(CenterEstimate { center: Point::Sphere(c), rho })
        }
        Vertices::Klein(p) => {
            let start = match plane_circumcenter(p) {
                Ok(c) if c.norm() < 0.999 => c,
                _ => (p[0] + p[1] + p[2]) / 3.0,
            };
            // cosh d(x, v) * sqrt(1 - |x|^2); monotone in d for fixed x.
            let residual = |x: &Vector2<f64>| {
                let d = p.map(|v| (1.0 - x.dot(&v)) / (1.0 - v.norm_squared()).sqrt());
                Vector2::new(d[0] - d[1], d[0] - d[2])
            };
            let center = solve_in_disk(residual, start)?;
            let rho = klein_distance_unchecked(&center, &p[0]).tanh();
            Ok(CenterEstimate { center: Point::Klein(center), rho })
        }
    }
}

/// Interior point equidistant from the three side lines.
pub fn incenter_oracle(e: &EmbeddedTriangle) -> Result<CenterEstimate, OracleError> {
    check_conditioning(&e.sides)?;
    match &e.vertices {
        Vertices::Plane(p) => {
            let [a, b, c] = e.sides.sides();
            let center = (p[0] * a + p[1] * b + p[2] * c) / (a + b + c);
            let rho = point_line_distance(&center, &p[0], &p[1]);
            Ok(CenterEstimate { center: Point::Plane(center), rho })
        }
        Vertices::Sphere(v) => {
            // Side planes through the origin, normals pointing at the opposite vertex.
            let normals = [(1, 2, 0), (0, 2, 1), (0, 1, 2)].map(|(i, j, k)| {
                let n = v[i].cross(&v[j]).normalize();
                if n.dot(&v[k]) < 0.0 {
                    -n
                } else {
                    n
                }
            });
            let m = Matrix3::from_rows(&[
                normals[0].transpose(),
                normals[1].transpose(),
                normals[2].transpose(),
            ]);
            let raw = m
                .lu()
                .solve(&Vector3::repeat(1.0))
                .ok_or_else(|| OracleError::Conditioning("singular side-normal system".into()))?;
            let c = raw.normalize();
            let sin_r = c.dot(&normals[0]);
            let rho = sin_r / (1.0 - sin_r * sin_r).sqrt();
            Ok(CenterEstimate { center: Point::Sphere(c), rho })
        }
        Vertices::Klein(p) => {
            let chords = [(p[1], p[2]), (p[0], p[2]), (p[0], p[1])];
            for (u, w) in &chords {
                if (u - w).norm() == 0.0 {
                    return Err(OracleError::Conditioning("coincident Klein vertices".into()));
                }
            }
            // Signed so that the opposite vertex lies on the positive side.
            let sides = [0, 1, 2].map(|k| {
                let (u, w) = chords[k];
                side_of(&p[k], &u, &w).signum()
            });
            let residual = |x: &Vector2<f64>| {
                let d = [0, 1, 2].map(|k| {
                    let (u, w) = chords[k];
                    let sign = if side_of(x, &u, &w) * sides[k] < 0.0 { -1.0 } else { 1.0 };
                    sign * klein_distance_to_line(x, &u, &w)
                });
                Vector2::new(d[0] - d[1], d[0] - d[2])
            };
            let [a, b, c] = [(p[1] - p[2]).norm(), (p[0] - p[2]).norm(), (p[0] - p[1]).norm()];
            let start = (p[0] * a + p[1] * b + p[2] * c) / (a + b + c);
            let center = solve_in_disk(&residual, start)
                .or_else(|_| solve_in_disk(&residual, (p[0] + p[1] + p[2]) / 3.0))?;
            let rho = klein_distance_to_line(&center, &p[1], &p[2]).tanh();
            Ok(CenterEstimate { center: Point::Klein(center), rho })
        }
    }
}

/// Rotates the circumcenter to the north pole and projects centrally onto the
/// tangent plane `z = 1`.
pub fn tangent_projection(e: &EmbeddedTriangle) -> Result<EmbeddedTriangle, OracleError> {
    let Vertices::Sphere(v) = &e.vertices else {
        return Err(OracleError::ProjectionDomain("tangent projection needs a spherical triangle".into()));
    };
    let c = sphere_circumcenter(v)?;
    let to_pole = householder_to_pole(&c);
    let mut projected = [Vector2::zeros(); 3];
    for (slot, vertex) in projected.iter_mut().zip(v) {
        let w = to_pole * vertex;
        if !(w.z > 1e-12) {
            return Err(OracleError::ProjectionDomain(format!(
                "vertex at angle {} from the pole",
                w.z.clamp(-1.0, 1.0).acos()
            )));
        }
        *slot = Vector2::new(w.x / w.z, w.y / w.z);
    }
    Ok(EmbeddedTriangle::new(Vertices::Plane(projected))?)
}

/// Orthogonal reflection taking the unit vector `c` to `(0, 0, 1)`.
pub fn householder_to_pole(c: &Vector3<f64>) -> Matrix3<f64> {
    let u = c - Vector3::z();
    let n2 = u.norm_squared();
    if n2 < 1e-30 {
        return Matrix3::identity();
    }
    Matrix3::identity() - u * u.transpose() * (2.0 / n2)
}

fn plane_circumcenter(p: &[Vector2<f64>; 3]) -> Result<Vector2<f64>, OracleError> {
    // Perpendicular bisectors: 2 (p_i - p_0) . x = |p_i|^2 - |p_0|^2.
    let d1 = p[1] - p[0];
    let d2 = p[2] - p[0];
    let m = Matrix2::new(d1.x, d1.y, d2.x, d2.y) * 2.0;
    let rhs = Vector2::new(
        p[1].norm_squared() - p[0].norm_squared(),
        p[2].norm_squared() - p[0].norm_squared(),
    );
    m.lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(|| OracleError::Conditioning("collinear vertices".into()))
}

fn sphere_circumcenter(v: &[Vector3<f64>; 3]) -> Result<Vector3<f64>, OracleError> {
    // c . (v1 - v0) = c . (v2 - v0) = 0, oriented toward the vertices.
    let n = (v[1] - v[0]).cross(&(v[2] - v[0]));
    let norm = n.norm();
    if !(norm > 0.0) {
        return Err(OracleError::Conditioning("coincident spherical vertices".into()));
    }
    let c = n / norm;
    Ok(if c.dot(&v[0]) < 0.0 { -c } else { c })
}

fn check_conditioning(t: &Triangle) -> Result<(), OracleError> {
    let [a, b, c] = t.sides();
    let slack = (a + b - c).min(a + c - b).min(b + c - a) / (a + b + c);
    if slack < MIN_RELATIVE_SLACK {
        return Err(OracleError::Conditioning(format!("relative slack {slack:e} below {MIN_RELATIVE_SLACK:e}")));
    }
    Ok(())
}

/// Twice the signed area of `(u, w, x)`.
fn side_of(x: &Vector2<f64>, u: &Vector2<f64>, w: &Vector2<f64>) -> f64 {
    let d = w - u;
    let r = x - u;
    d.x * r.y - d.y * r.x
}

fn point_line_distance(x: &Vector2<f64>, u: &Vector2<f64>, w: &Vector2<f64>) -> f64 {
    let d = w - u;
    let r = x - u;
    (d.x * r.y - d.y * r.x).abs() / d.norm()
}

/// Hyperbolic distance from `x` to the geodesic through `u` and `w`, minimised
/// numerically along the chord.
pub(crate) fn klein_distance_to_line(x: &Vector2<f64>, u: &Vector2<f64>, w: &Vector2<f64>) -> f64 {
    let d = w - u;
    // |u + t d| = 1 at the two chord endpoints.
    let qa = d.norm_squared();
    let qb = 2.0 * u.dot(&d);
    let qc = u.norm_squared() - 1.0;
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let t_lo = (-qb - disc) / (2.0 * qa);
    let t_hi = (-qb + disc) / (2.0 * qa);
    let margin = 1e-9 * (t_hi - t_lo);
    let along = |t: f64| klein_distance_unchecked(x, &(u + d * t));
    golden_section_min(along, t_lo + margin, t_hi - margin)
}

fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// Damped Newton iteration with a central-difference Jacobian, kept inside
/// the open unit disk.
fn solve_in_disk<F>(residual: F, start: Vector2<f64>) -> Result<Vector2<f64>, OracleError>
where
    F: Fn(&Vector2<f64>) -> Vector2<f64>,
{
    let mut x = start;
    let mut fx = residual(&x);
    for _ in 0..ROOT_MAX_ITER {
        let err = fx.amax();
        if err <= ROOT_TOLERANCE {
            return Ok(x);
        }
        let h = 1e-7;
        let mut jac = Matrix2::zeros();
        for k in 0..2 {
            let mut e = Vector2::zeros();
            e[k] = h;
            let col = (residual(&(x + e)) - residual(&(x - e))) / (2.0 * h);
            jac.set_column(k, &col);
        }
        let step = jac
            .lu()
            .solve(&(-fx))
            .ok_or_else(|| OracleError::Conditioning("singular Jacobian in Klein root finding".into()))?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = x + step * scale;
            if cand.norm() < 1.0 - 1e-12 {
                let fc = residual(&cand);
                if fc.amax() < err {
                    x = cand;
                    fx = fc;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            // Stalled at the rounding floor of the distance evaluations.
            if err <= 1e-9 {
                return Ok(x);
            }
            return Err(OracleError::Conditioning(format!(
                "Klein root finding stalled with residual {err:e}"
            )));
        }
    }
    if fx.amax() <= 1e-9 {
        return Ok(x);
    }
    Err(OracleError::Conditioning(format!(
        "Klein root finding did not converge in {ROOT_MAX_ITER} iterations"
    )))
}

/// Edge-length ratios `projected side / s(side)`; constant for a tangent
/// projection.
pub fn projection_scale_factors(original: &Triangle, projected: &Triangle) -> [f64; 3] {
    let s = original.shadow_sides();
    let p = projected.sides();
    [p[0] / s[0], p[1] / s[1], p[2] / s[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{circumradius_functional, inradius_functional, klein_distance};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn octant() -> EmbeddedTriangle {
        EmbeddedTriangle::new(Vertices::Sphere([Vector3::x(), Vector3::y(), Vector3::z()])).unwrap()
    }

    fn right_345() -> EmbeddedTriangle {
        EmbeddedTriangle::new(Vertices::Plane([
            Vector2::new(0.0, 0.0),
            Vector2::new(3.0, 0.0),
            Vector2::new(0.0, 4.0),
        ]))
        .unwrap()
    }

    #[test]
    fn octant_centers() {
        let e = octant();
        let expected = Vector3::repeat(1.0 / 3f64.sqrt());
        let cc = circumcenter_oracle(&e).unwrap();
        let Point::Sphere(c) = cc.center else { panic!() };
        assert!((c - expected).norm() < 1e-15);
        assert!((cc.rho - 2f64.sqrt()).abs() < 1e-14);
        let ic = incenter_oracle(&e).unwrap();
        let Point::Sphere(c) = ic.center else { panic!() };
        assert!((c - expected).norm() < 1e-15);
        assert!((ic.rho - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn plane_centers() {
        let e = right_345();
        let cc = circumcenter_oracle(&e).unwrap();
        assert_eq!(cc.center, Point::Plane(Vector2::new(1.5, 2.0)));
        assert!((cc.rho - 2.5).abs() < 1e-15);
        let ic = incenter_oracle(&e).unwrap();
        let Point::Plane(c) = ic.center else { panic!() };
        assert!((c - Vector2::new(1.0, 1.0)).norm() < 1e-15);
        assert!((ic.rho - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slivers_are_refused() {
        let flat = EmbeddedTriangle::new(Vertices::Plane([
            Vector2::new(0.0, 0.0),
            Vector2::new(2.0, 1e-4),
            Vector2::new(4.0, 0.0),
        ]))
        .unwrap();
        assert!(matches!(circumcenter_oracle(&flat), Err(OracleError::Conditioning(_))));
        assert!(matches!(incenter_oracle(&flat), Err(OracleError::Conditioning(_))));
    }

    #[test]
    fn klein_centers_match_formulas() {
        let e = EmbeddedTriangle::new(Vertices::Klein([
            Vector2::new(0.1, -0.2),
            Vector2::new(0.6, 0.1),
            Vector2::new(-0.3, 0.5),
        ]))
        .unwrap();
        let cc = circumcenter_oracle(&e).unwrap();
        let ic = incenter_oracle(&e).unwrap();
        let rr = circumradius_functional(&e.sides).value;
        let r = inradius_functional(&e.sides).value;
        assert!(((cc.rho - rr) / rr).abs() < 1e-10, "{} vs {}", cc.rho, rr);
        assert!(((ic.rho - r) / r).abs() < 1e-10, "{} vs {}", ic.rho, r);
    }

    #[test]
    fn distance_to_line_on_axis() {
        // Point (0, y) to the diameter along the x axis: foot at the origin.
        let x = Vector2::new(0.0, 0.4);
        let d = klein_distance_to_line(&x, &Vector2::new(-0.5, 0.0), &Vector2::new(0.2, 0.0));
        let direct = klein_distance(&x, &Vector2::zeros()).unwrap();
        assert!((d - direct).abs() < 1e-12);
    }

    #[test]
    fn octant_projection() {
        let e = octant();
        let p = tangent_projection(&e).unwrap();
        let k = 2.0 / (1.0 / 3f64.sqrt());
        for side in p.sides.sides() {
            assert!((side - k * FRAC_1_SQRT_2).abs() < 1e-12, "{side}");
        }
    }

    #[test]
    fn projection_rejects_plane_input() {
        assert!(matches!(tangent_projection(&right_345()), Err(OracleError::ProjectionDomain(_))));
    }

    #[test]
    fn householder_maps_center_to_pole() {
        let c = Vector3::new(0.3, -0.4, 0.5).normalize();
        let h = householder_to_pole(&c);
        assert!((h * c - Vector3::z()).norm() < 1e-15);
        assert!((h * h.transpose() - Matrix3::identity()).norm() < 1e-15);
        assert_eq!(householder_to_pole(&Vector3::z()), Matrix3::identity());
    }
}
