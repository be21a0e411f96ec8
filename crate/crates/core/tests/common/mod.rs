//! Reference computations for the integration tests. Nothing here calls the
//! library's formulas: triangles are laid out from their sides with the law
//! of cosines and the radii are read off the resulting vertices.

#![allow(dead_code)]

use curvtri::Geometry;

pub type V3 = [f64; 3];

fn dot(u: V3, v: V3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn cross(u: V3, v: V3) -> V3 {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

fn sub(u: V3, v: V3) -> V3 {
    [u[0] - v[0], u[1] - v[1], u[2] - v[2]]
}

fn scale(u: V3, k: f64) -> V3 {
    [u[0] * k, u[1] * k, u[2] * k]
}

fn add3(u: V3, v: V3, w: V3) -> V3 {
    [u[0] + v[0] + w[0], u[1] + v[1] + w[1], u[2] + v[2] + w[2]]
}

/// Minkowski product with signature (+, +, -).
fn mink(u: V3, v: V3) -> f64 {
    u[0] * v[0] + u[1] * v[1] - u[2] * v[2]
}

/// Vertices `[A, B, C]` with `a = |BC|`, `b = |CA|`, `c = |AB|`: plane points
/// (z = 0), unit vectors, or points on the upper hyperboloid sheet.
pub fn layout(kind: Geometry, a: f64, b: f64, c: f64) -> [V3; 3] {
    match kind {
        Geometry::Euclidean => {
            let cos_a = (b * b + c * c - a * a) / (2.0 * b * c);
            let sin_a = (1.0 - cos_a * cos_a).max(0.0).sqrt();
            [[0.0, 0.0, 0.0], [c, 0.0, 0.0], [b * cos_a, b * sin_a, 0.0]]
        }
        Geometry::Spherical => {
            let cos_a = (a.cos() - b.cos() * c.cos()) / (b.sin() * c.sin());
            let sin_a = (1.0 - cos_a * cos_a).max(0.0).sqrt();
            [
                [0.0, 0.0, 1.0],
                [c.sin(), 0.0, c.cos()],
                [b.sin() * cos_a, b.sin() * sin_a, b.cos()],
            ]
        }
        Geometry::Hyperbolic => {
            let cos_a = (b.cosh() * c.cosh() - a.cosh()) / (b.sinh() * c.sinh());
            let sin_a = (1.0 - cos_a * cos_a).max(0.0).sqrt();
            [
                [0.0, 0.0, 1.0],
                [c.sinh(), 0.0, c.cosh()],
                [b.sinh() * cos_a, b.sinh() * sin_a, b.cosh()],
            ]
        }
    }
}

/// `(rho(R), rho(r))` from the laid-out vertices. `None` for a hyperbolic
/// triangle without a circumcircle.
pub fn reference_radii(kind: Geometry, a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let [pa, pb, pc] = layout(kind, a, b, c);
    match kind {
        Geometry::Euclidean => {
            let area2 = cross(sub(pb, pa), sub(pc, pa))[2].abs();
            Some((a * b * c / (2.0 * area2), area2 / (a + b + c)))
        }
        Geometry::Spherical => {
            let mut center = cross(sub(pb, pa), sub(pc, pa));
            if dot(center, pa) < 0.0 {
                center = scale(center, -1.0);
            }
            let center = scale(center, 1.0 / dot(center, center).sqrt());
            let cos_big = dot(center, pa);
            let tan_big = (1.0 - cos_big * cos_big).sqrt() / cos_big;

            let inc = add3(scale(pa, a.sin()), scale(pb, b.sin()), scale(pc, c.sin()));
            let inc = scale(inc, 1.0 / dot(inc, inc).sqrt());
            let n = cross(pb, pc);
            let sin_small = dot(inc, n).abs() / dot(n, n).sqrt();
            let tan_small = sin_small / (1.0 - sin_small * sin_small).sqrt();
            Some((tan_big, tan_small))
        }
        Geometry::Hyperbolic => {
            let w = cross(sub(pb, pa), sub(pc, pa));
            let mut center = [w[0], w[1], -w[2]];
            let norm2 = -mink(center, center);
            if !(norm2 > 0.0) {
                return None;
            }
            if center[2] < 0.0 {
                center = scale(center, -1.0);
            }
            let center = scale(center, 1.0 / norm2.sqrt());
            let cosh_big = -mink(center, pa);
            let tanh_big = (cosh_big * cosh_big - 1.0).sqrt() / cosh_big;

            let inc = add3(scale(pa, a.sinh()), scale(pb, b.sinh()), scale(pc, c.sinh()));
            let inc = scale(inc, 1.0 / (-mink(inc, inc)).sqrt());
            let w = cross(pb, pc);
            let normal = [w[0], w[1], -w[2]];
            let normal = scale(normal, 1.0 / mink(normal, normal).sqrt());
            let sinh_small = mink(inc, normal).abs();
            let cosh_small = (1.0 + sinh_small * sinh_small).sqrt();
            Some((tanh_big, sinh_small / cosh_small))
        }
    }
}

/// Klein-disk distance from the boundary points of the chord through `p`
/// and `q`: `d = ln((|a q| |p b|) / (|a p| |q b|)) / 2`.
pub fn klein_distance_boundary(p: [f64; 2], q: [f64; 2]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let dd = d[0] * d[0] + d[1] * d[1];
    let pd = p[0] * d[0] + p[1] * d[1];
    let pp = p[0] * p[0] + p[1] * p[1];
    // |p + t d| = 1
    let disc = (pd * pd - dd * (pp - 1.0)).sqrt();
    let t_lo = (-pd - disc) / dd;
    let t_hi = (-pd + disc) / dd;
    let len = dd.sqrt();
    // p sits at t = 0 and q at t = 1 along the chord.
    let ap = -t_lo * len;
    let aq = (1.0 - t_lo) * len;
    let pb = t_hi * len;
    let qb = (t_hi - 1.0) * len;
    0.5 * ((aq * pb) / (ap * qb)).ln()
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}
