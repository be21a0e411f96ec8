//! Closed-form metric quantities for triangles of constant curvature.
//!
//! Every formula branches on a [`Geometry`] tag: the Euclidean plane (K = 0),
//! the unit sphere (K = +1) and the hyperbolic plane in the Klein disk model
//! (K = -1). The half-side map `s` (x/2, sin(x/2), sinh(x/2)) turns the
//! Euclidean circumradius and inradius formulas into formulas for
//! `rho(R)` and `rho(r)`, where `rho` is the identity, `tan` or `tanh`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on hyperbolic side lengths.
pub const DEFAULT_HYPERBOLIC_SIDE_CAP: f64 = 20.0;

/// Triangle-inequality slack (relative to the perimeter) at or below which a
/// triangle is treated as degenerate.
pub const DEGENERACY_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("side length {0} is not a positive finite number")]
    NonPositiveSide(f64),
    #[error("sides ({a}, {b}, {c}) violate the strict triangle inequality")]
    TriangleInequalityViolated { a: f64, b: f64, c: f64 },
    #[error("{0}")]
    SphericalDomainViolated(String),
    #[error("side length {side} exceeds the hyperbolic cap {cap}")]
    SideLengthCapExceeded { side: f64, cap: f64 },
    #[error("hyperbolic sides ({a}, {b}, {c}) admit no circumscribed circle")]
    NoCircumcircle { a: f64, b: f64, c: f64 },
    #[error("vertices are collinear or coincident")]
    DegenerateTriangle,
    #[error("{0}")]
    InvalidInput(String),
}

impl GeometryError {
    /// Stable identifier of the violated invariant.
    pub fn code(&self) -> &'static str {
        match self {
            GeometryError::NonPositiveSide(_) => "NonPositiveSide",
            GeometryError::TriangleInequalityViolated { .. } => "TriangleInequalityViolated",
            GeometryError::SphericalDomainViolated(_) => "SphericalDomainViolated",
            GeometryError::SideLengthCapExceeded { .. } => "SideLengthCapExceeded",
            GeometryError::NoCircumcircle { .. } => "NoCircumcircle",
            GeometryError::DegenerateTriangle => "DegenerateTriangle",
            GeometryError::InvalidInput(_) => "InvalidInput",
        }
    }
}

/// Curvature tag selecting every formula branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl Geometry {
    pub const ALL: [Geometry; 3] = [Geometry::Euclidean, Geometry::Spherical, Geometry::Hyperbolic];

    /// Gaussian curvature: 0, +1 or -1.
    pub fn curvature(self) -> i8 {
        match self {
            Geometry::Euclidean => 0,
            Geometry::Spherical => 1,
            Geometry::Hyperbolic => -1,
        }
    }

    pub fn from_curvature(k: i8) -> Option<Geometry> {
        match k {
            0 => Some(Geometry::Euclidean),
            1 => Some(Geometry::Spherical),
            -1 => Some(Geometry::Hyperbolic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Euclidean => "euclidean",
            Geometry::Spherical => "spherical",
            Geometry::Hyperbolic => "hyperbolic",
        }
    }

    /// The half-side map without domain checks. See [`s_func`].
    #[inline]
    pub fn s(self, x: f64) -> f64 {
        match self {
            Geometry::Euclidean => 0.5 * x,
            Geometry::Spherical => (0.5 * x).sin(),
            Geometry::Hyperbolic => (0.5 * x).sinh(),
        }
    }

    /// `rho`: identity, tangent or hyperbolic tangent of a geodesic radius.
    #[inline]
    pub fn rho(self, radius: f64) -> f64 {
        match self {
            Geometry::Euclidean => radius,
            Geometry::Spherical => radius.tan(),
            Geometry::Hyperbolic => radius.tanh(),
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Geometry {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "e" | "0" => Ok(Geometry::Euclidean),
            "spherical" | "s" | "1" | "+1" => Ok(Geometry::Spherical),
            "hyperbolic" | "h" | "-1" => Ok(Geometry::Hyperbolic),
            other => Err(GeometryError::InvalidInput(format!("unknown geometry '{other}'"))),
        }
    }
}

/// The unifying half-side function: `x/2`, `sin(x/2)` or `sinh(x/2)`.
pub fn s_func(kind: Geometry, x: f64) -> Result<f64, GeometryError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(GeometryError::InvalidInput(format!(
            "s-function argument {x} must be a finite non-negative length"
        )));
    }
    if kind == Geometry::Spherical && x > 2.0 * PI {
        return Err(GeometryError::InvalidInput(format!(
            "spherical s-function argument {x} exceeds 2*pi"
        )));
    }
    Ok(kind.s(x))
}

/// Side-length triple validated for one geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    kind: Geometry,
    a: f64,
    b: f64,
    c: f64,
}

impl Triangle {
    pub fn new(kind: Geometry, a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        Self::with_side_cap(kind, a, b, c, DEFAULT_HYPERBOLIC_SIDE_CAP)
    }

    /// Like [`Triangle::new`] with an explicit hyperbolic side cap.
    pub fn with_side_cap(
        kind: Geometry,
        a: f64,
        b: f64,
        c: f64,
        cap: f64,
    ) -> Result<Self, GeometryError> {
        for side in [a, b, c] {
            if !(side > 0.0) || !side.is_finite() {
                return Err(GeometryError::NonPositiveSide(side));
            }
        }
        let perimeter = a + b + c;
        if min_slack(a, b, c) <= DEGENERACY_FLOOR * perimeter {
            return Err(GeometryError::TriangleInequalityViolated { a, b, c });
        }
        match kind {
            Geometry::Euclidean => {}
            Geometry::Spherical => {
                if let Some(side) = [a, b, c].into_iter().find(|&x| x >= PI) {
                    return Err(GeometryError::SphericalDomainViolated(format!(
                        "side {side} is not shorter than pi"
                    )));
                }
                if perimeter >= 2.0 * PI {
                    return Err(GeometryError::SphericalDomainViolated(format!(
                        "perimeter {perimeter} is not shorter than 2*pi"
                    )));
                }
                // cos R > 0 is implied by the two checks above; the radicand
                // test guards against rounding at the boundary.
                let t = Triangle { kind, a, b, c };
                let radicand = t.radicand();
                let tan_r = t.circumradius_value();
                if !(radicand > 0.0) || !tan_r.is_finite() {
                    return Err(GeometryError::SphericalDomainViolated(format!(
                        "circumradius is not below pi/2 (tan R = {tan_r})"
                    )));
                }
            }
            Geometry::Hyperbolic => {
                if let Some(side) = [a, b, c].into_iter().find(|&x| x > cap) {
                    return Err(GeometryError::SideLengthCapExceeded { side, cap });
                }
                let [sa, sb, sc] = [a, b, c].map(|x| kind.s(x));
                if min_slack(sa, sb, sc) <= DEGENERACY_FLOOR * (sa + sb + sc) {
                    return Err(GeometryError::NoCircumcircle { a, b, c });
                }
            }
        }
        Ok(Triangle { kind, a, b, c })
    }

    pub fn kind(&self) -> Geometry {
        self.kind
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.c
    }

    /// `[s(a), s(b), s(c)]`.
    pub fn shadow_sides(&self) -> [f64; 3] {
        self.sides().map(|x| self.kind.s(x))
    }

    /// `s(a+b+c)`.
    pub fn s_perimeter(&self) -> f64 {
        self.kind.s(self.perimeter())
    }

    /// `[s(b+c-a), s(a+c-b), s(a+b-c)]`.
    pub fn s_slacks(&self) -> [f64; 3] {
        let (a, b, c) = (self.a, self.b, self.c);
        [b + c - a, a + c - b, a + b - c].map(|x| self.kind.s(x))
    }

    /// `s(a) * s(b) * s(c)`.
    pub fn s_product(&self) -> f64 {
        self.shadow_sides().iter().product()
    }

    /// `(s(a)+s(b)+s(c)) / s(a+b+c)`, the correction base of the transport theorem.
    pub fn perimeter_ratio(&self) -> f64 {
        self.shadow_sides().iter().sum::<f64>() / self.s_perimeter()
    }

    /// Largest minus smallest side.
    pub fn spread(&self) -> f64 {
        let s = self.sides();
        s.iter().cloned().fold(f64::MIN, f64::max) - s.iter().cloned().fold(f64::MAX, f64::min)
    }

    /// The triangle with the same kind and sides scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Triangle, GeometryError> {
        Triangle::new(self.kind, lambda * self.a, lambda * self.b, lambda * self.c)
    }

    /// The same sides reinterpreted in another geometry.
    pub fn in_geometry(&self, kind: Geometry) -> Result<Triangle, GeometryError> {
        Triangle::new(kind, self.a, self.b, self.c)
    }

    /// All six orderings of the sides.
    pub fn permutations(&self) -> [Triangle; 6] {
        let (a, b, c) = (self.a, self.b, self.c);
        [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
            .map(|(x, y, z)| Triangle { kind: self.kind, a: x, b: y, c: z })
    }

    fn radicand(&self) -> f64 {
        self.s_slacks().iter().product::<f64>() * self.s_perimeter()
    }

    fn circumradius_value(&self) -> f64 {
        2.0 * self.s_product() / self.radicand().sqrt()
    }

    fn inradius_value(&self) -> f64 {
        (self.s_slacks().iter().product::<f64>() / self.s_perimeter()).sqrt()
    }
}

fn min_slack(a: f64, b: f64, c: f64) -> f64 {
    (a + b - c).min(a + c - b).min(b + c - a)
}

/// Validates a side triple; thin wrapper over [`Triangle::new`].
pub fn validate_triangle(kind: Geometry, a: f64, b: f64, c: f64) -> Result<Triangle, GeometryError> {
    Triangle::new(kind, a, b, c)
}

/// The Euclidean triangle with sides `s(a), s(b), s(c)`.
pub fn euclidean_shadow(t: &Triangle) -> Result<Triangle, GeometryError> {
    let [x, y, z] = t.shadow_sides();
    Triangle::new(Geometry::Euclidean, x, y, z)
}

/// `rho(R)` or `rho(r)` tagged with its geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusFunctional {
    pub kind: Geometry,
    pub value: f64,
}

impl RadiusFunctional {
    /// The geodesic radius behind the functional value.
    pub fn radius(&self) -> Result<f64, GeometryError> {
        radius_from_functional(self.kind, self.value)
    }
}

/// `2 s(a)s(b)s(c) / sqrt(s(a+b-c) s(a+c-b) s(b+c-a) s(a+b+c))`: R, tan R or tanh R.
pub fn circumradius_functional(t: &Triangle) -> RadiusFunctional {
    RadiusFunctional { kind: t.kind, value: t.circumradius_value() }
}

/// `sqrt(s(a+b-c) s(a+c-b) s(b+c-a) / s(a+b+c))`: r, tan r or tanh r.
pub fn inradius_functional(t: &Triangle) -> RadiusFunctional {
    RadiusFunctional { kind: t.kind, value: t.inradius_value() }
}

/// Inverts `rho`: identity, `atan` or `atanh`.
pub fn radius_from_functional(kind: Geometry, v: f64) -> Result<f64, GeometryError> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(GeometryError::InvalidInput(format!(
            "radius functional {v} must be positive and finite"
        )));
    }
    match kind {
        Geometry::Euclidean => Ok(v),
        Geometry::Spherical => Ok(v.atan()),
        Geometry::Hyperbolic if v < 1.0 => Ok(v.atanh()),
        Geometry::Hyperbolic => Err(GeometryError::InvalidInput(format!(
            "hyperbolic radius functional {v} must be below 1"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JPair {
    pub j: f64,
    pub jbar: f64,
}

/// `J` from the s-transformed slacks and `J-bar` from the slacks of the
/// s-transformed sides.
pub fn j_invariants(t: &Triangle) -> JPair {
    let j = t.s_slacks().iter().product::<f64>().sqrt();
    let [x, y, z] = t.shadow_sides();
    let jbar = ((x + y - z) * (x + z - y) * (y + z - x)).sqrt();
    JPair { j, jbar }
}

/// Hyperbolic distance between two points of the open Klein disk.
///
/// Uses the inner-product form of the cross-ratio:
/// `cosh d = (1 - p.q) / sqrt((1 - |p|^2)(1 - |q|^2))` for far-apart points and
/// `tanh d = sqrt(|p - q|^2 - (p x q)^2) / (1 - p.q)` for nearby ones.
pub fn klein_distance(p: &Vector2<f64>, q: &Vector2<f64>) -> Result<f64, GeometryError> {
    for (label, v) in [("p", p), ("q", q)] {
        let n2 = v.norm_squared();
        if !(n2 < 1.0) {
            return Err(GeometryError::InvalidInput(format!(
                "Klein point {label} = ({}, {}) is not inside the open unit disk",
                v.x, v.y
            )));
        }
    }
    Ok(klein_distance_unchecked(p, q))
}

pub(crate) fn klein_distance_unchecked(p: &Vector2<f64>, q: &Vector2<f64>) -> f64 {
    let one_minus_dot = 1.0 - p.dot(q);
    let cosh = one_minus_dot / ((1.0 - p.norm_squared()) * (1.0 - q.norm_squared())).sqrt();
    if cosh > 1.25 {
        return cosh.acosh();
    }
    let cross = p.x * q.y - p.y * q.x;
    let num = ((p - q).norm_squared() - cross * cross).max(0.0);
    (num.sqrt() / one_minus_dot).atanh()
}

/// Great-circle distance between unit vectors.
pub fn arc_distance(u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    u.cross(v).norm().atan2(u.dot(v))
}

/// Three vertices in the model of one geometry: plane points, unit vectors or
/// Klein-disk points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vertices {
    Plane([Vector2<f64>; 3]),
    Sphere([Vector3<f64>; 3]),
    Klein([Vector2<f64>; 3]),
}

impl Vertices {
    pub fn kind(&self) -> Geometry {
        match self {
            Vertices::Plane(_) => Geometry::Euclidean,
            Vertices::Sphere(_) => Geometry::Spherical,
            Vertices::Klein(_) => Geometry::Hyperbolic,
        }
    }
}

/// Pairwise geodesic distances; side `a` is opposite the first vertex.
pub fn side_lengths_from_vertices(v: &Vertices) -> Result<Triangle, GeometryError> {
    let (a, b, c) = match v {
        Vertices::Plane(p) => {
            check_planar_degeneracy(p)?;
            ((p[1] - p[2]).norm(), (p[0] - p[2]).norm(), (p[0] - p[1]).norm())
        }
        Vertices::Sphere(p) => {
            for u in p {
                if ((u.norm() - 1.0).abs()) > 1e-9 {
                    return Err(GeometryError::InvalidInput(format!(
                        "spherical vertex has norm {}, expected 1",
                        u.norm()
                    )));
                }
            }
            let max_chord = [(p[1] - p[2]).norm(), (p[0] - p[2]).norm(), (p[0] - p[1]).norm()]
                .into_iter()
                .fold(0.0, f64::max);
            let det = p[0].dot(&p[1].cross(&p[2]));
            if det.abs() <= DEGENERACY_FLOOR * max_chord * max_chord {
                return Err(GeometryError::DegenerateTriangle);
            }
            (arc_distance(&p[1], &p[2]), arc_distance(&p[0], &p[2]), arc_distance(&p[0], &p[1]))
        }
        Vertices::Klein(p) => {
            check_planar_degeneracy(p)?;
            (klein_distance(&p[1], &p[2])?, klein_distance(&p[0], &p[2])?, klein_distance(&p[0], &p[1])?)
        }
    };
    Triangle::new(v.kind(), a, b, c)
}

fn check_planar_degeneracy(p: &[Vector2<f64>; 3]) -> Result<(), GeometryError> {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let scale = e1.norm_squared().max(e2.norm_squared()).max((p[2] - p[1]).norm_squared());
    let cross = e1.x * e2.y - e1.y * e2.x;
    if !(cross.abs() > DEGENERACY_FLOOR * scale) {
        return Err(GeometryError::DegenerateTriangle);
    }
    Ok(())
}
