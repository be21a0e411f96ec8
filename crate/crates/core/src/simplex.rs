//! Euler's inequality for n-simplices: `R >= n r` in Euclidean space and
//! `tan R >= n tan r` on the unit sphere, with the gnomonic projection that
//! links the two.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Geometry;
use crate::inequality::InequalityEvaluation;
use crate::sampling::{stream_rng, REJECTION_BUDGET};

/// Relative volume below which a Euclidean simplex counts as degenerate.
pub const VOLUME_FLOOR: f64 = 1e-12;
/// Half-angle of the cap used to sample spherical simplex vertices.
pub const SPHERICAL_CAP: f64 = std::f64::consts::FRAC_PI_2 - 0.1;
/// Sampled spherical simplices must have circumradius below this.
pub const SPHERICAL_R_LIMIT: f64 = std::f64::consts::FRAC_PI_2 - 0.05;
/// Tolerance on `r' >= tan r` for the projected simplex.
pub const PROJECTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("ill-conditioned simplex: {0}")]
    Conditioning(String),
    #[error("circumradius {0} is not below pi/2")]
    HemisphereViolation(f64),
    #[error("vertex outside the projection domain: {0}")]
    ProjectionDomain(String),
    #[error("invalid simplex input: {0}")]
    InvalidInput(String),
    #[error("no acceptable simplex after {attempts} attempts")]
    RejectionBudgetExceeded { attempts: usize },
}

fn sq_dist(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    (p - q).norm_squared()
}

/// k-volume of the simplex spanned by `k + 1` points, from the
/// Cayley-Menger determinant of their pairwise squared distances.
pub fn cayley_menger_volume(points: &[DVector<f64>]) -> f64 {
    let k = points.len().saturating_sub(1);
    if k == 0 {
        return 0.0;
    }
    let m = k + 2;
    let mut cm = DMatrix::<f64>::zeros(m, m);
    for i in 1..m {
        cm[(0, i)] = 1.0;
        cm[(i, 0)] = 1.0;
    }
    for i in 0..=k {
        for j in (i + 1)..=k {
            let d = sq_dist(&points[i], &points[j]);
            cm[(i + 1, j + 1)] = d;
            cm[(j + 1, i + 1)] = d;
        }
    }
    let factorial: f64 = (1..=k).map(|x| x as f64).product();
    let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let v2 = sign * cm.determinant() / (2f64.powi(k as i32) * factorial * factorial);
    v2.max(0.0).sqrt()
}

fn max_edge(points: &[DVector<f64>]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            m = m.max(sq_dist(&points[i], &points[j]).sqrt());
        }
    }
    m
}

/// `n + 1` affinely independent points in n-space.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanSimplex {
    vertices: Vec<DVector<f64>>,
}

impl EuclideanSimplex {
    pub fn new(vertices: Vec<DVector<f64>>) -> Result<Self, SimplexError> {
        let n = vertices.len().saturating_sub(1);
        if n < 2 {
            return Err(SimplexError::InvalidInput(format!("need at least 3 vertices, got {}", vertices.len())));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(SimplexError::InvalidInput(format!("vertex of length {} in {n}-space", v.len())));
        }
        if vertices.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(SimplexError::InvalidInput("non-finite coordinate".into()));
        }
        let scale = max_edge(&vertices);
        let volume = cayley_menger_volume(&vertices);
        if !(volume > VOLUME_FLOOR * scale.powi(n as i32)) {
            return Err(SimplexError::Conditioning(format!("volume {volume:e} at scale {scale}")));
        }
        Ok(EuclideanSimplex { vertices })
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn volume(&self) -> f64 {
        cayley_menger_volume(&self.vertices)
    }

    /// Vertices of the facet opposite vertex `j`.
    pub fn facet(&self, j: usize) -> Vec<DVector<f64>> {
        self.vertices.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, v)| v.clone()).collect()
    }

    /// Regular simplex with edge `edge`: the standard basis of n-space plus
    /// the point `t (1, ..., 1)` equidistant from it.
    pub fn regular(n: usize, edge: f64) -> Result<Self, SimplexError> {
        let t = (1.0 - ((n + 1) as f64).sqrt()) / n as f64;
        let k = edge / 2f64.sqrt();
        let mut vs: Vec<DVector<f64>> = (0..n).map(|i| DVector::from_fn(n, |j, _| if i == j { k } else { 0.0 })).collect();
        vs.push(DVector::from_element(n, k * t));
        EuclideanSimplex::new(vs)
    }
}

/// Circumcenter and circumradius from the equidistance equations
/// `2 (v_i - v_0) . c = |v_i|^2 - |v_0|^2`.
pub fn euclidean_circumradius(s: &EuclideanSimplex) -> Result<(DVector<f64>, f64), SimplexError> {
    let n = s.dimension();
    let v = &s.vertices;
    let a = DMatrix::from_fn(n, n, |i, j| 2.0 * (v[i + 1][j] - v[0][j]));
    let b = DVector::from_fn(n, |i, _| v[i + 1].norm_squared() - v[0].norm_squared());
    let c = a
        .lu()
        .solve(&b)
        .filter(|c| c.iter().all(|x| x.is_finite()))
        .ok_or_else(|| SimplexError::Conditioning("singular equidistance system".into()))?;
    let r = (&c - &v[0]).norm();
    Ok((c, r))
}

/// Incenter as the facet-volume weighted vertex average; `r = n V / sum(w)`.
pub fn euclidean_inradius(s: &EuclideanSimplex) -> Result<(DVector<f64>, f64), SimplexError> {
    let n = s.dimension();
    let weights: Vec<f64> = (0..=n).map(|j| cayley_menger_volume(&s.facet(j))).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(SimplexError::Conditioning("zero facet volumes".into()));
    }
    let mut center = DVector::zeros(n);
    for (w, v) in weights.iter().zip(&s.vertices) {
        center += v * (*w / total);
    }
    Ok((center, n as f64 * s.volume() / total))
}

/// Distance from `p` to the affine hull of each facet, by least squares.
pub fn facet_distances(s: &EuclideanSimplex, p: &DVector<f64>) -> Result<Vec<f64>, SimplexError> {
    let n = s.dimension();
    (0..=n)
        .map(|j| {
            let f = s.facet(j);
            let e = DMatrix::from_fn(n, n - 1, |i, k| f[k + 1][i] - f[0][i]);
            let rhs = p - &f[0];
            let x = e
                .clone()
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .map_err(|m| SimplexError::Conditioning(format!("facet {j}: {m}")))?;
            Ok((rhs - e * x).norm())
        })
        .collect()
}

/// `n + 1` linearly independent unit vectors in `(n+1)`-space.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalSimplex {
    vertices: Vec<DVector<f64>>,
}

impl SphericalSimplex {
    pub fn new(vertices: Vec<DVector<f64>>) -> Result<Self, SimplexError> {
        let m = vertices.len();
        if m < 3 {
            return Err(SimplexError::InvalidInput(format!("need at least 3 vertices, got {m}")));
        }
        for v in &vertices {
            if v.len() != m {
                return Err(SimplexError::InvalidInput(format!("vertex of length {} in {m}-space", v.len())));
            }
            if !((v.norm() - 1.0).abs() <= 1e-9) {
                return Err(SimplexError::InvalidInput(format!("vertex norm {}", v.norm())));
            }
        }
        let s = SphericalSimplex { vertices };
        let sv = s.matrix().singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        if !(lo > 1e-10 * hi) {
            return Err(SimplexError::Conditioning(format!("singular values {lo:e} / {hi:e}")));
        }
        let (_, r) = spherical_circumradius(&s)?;
        if !(r < std::f64::consts::FRAC_PI_2) {
            return Err(SimplexError::HemisphereViolation(r));
        }
        Ok(s)
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    /// Columns are the vertices.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.vertices)
    }

    /// The standard basis of `(n+1)`-space.
    pub fn orthant(n: usize) -> Self {
        let vs = (0..=n).map(|i| DVector::from_fn(n + 1, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
        SphericalSimplex::new(vs).expect("orthant simplex is valid")
    }

    /// Great-circle distances `d_ij` for `i < j`, row by row.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                let (u, v) = (&self.vertices[i], &self.vertices[j]);
                let cross2 = (u.norm_squared() * v.norm_squared() - u.dot(v).powi(2)).max(0.0);
                out.push(cross2.sqrt().atan2(u.dot(v)));
            }
        }
        out
    }
}

/// Center `c` with `c . v_i` equal for all `i`: solve `V^T x = 1` and
/// normalize, so `cos R = 1 / |x|`.
pub fn spherical_circumradius(s: &SphericalSimplex) -> Result<(DVector<f64>, f64), SimplexError> {
    let m = s.vertices.len();
    let x = s
        .matrix()
        .transpose()
        .lu()
        .solve(&DVector::from_element(m, 1.0))
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(|| SimplexError::Conditioning("singular vertex matrix".into()))?;
    let norm = x.norm();
    let r = (1.0 / norm).acos();
    Ok((x / norm, r))
}

/// Inward unit normals of the facets: row `j` of `V^{-1}` is orthogonal to
/// every vertex but `v_j` and has positive product with it.
pub fn inward_normals(s: &SphericalSimplex) -> Result<Vec<DVector<f64>>, SimplexError> {
    let inv = s
        .matrix()
        .try_inverse()
        .ok_or_else(|| SimplexError::Conditioning("singular vertex matrix".into()))?;
    Ok((0..inv.nrows()).map(|j| inv.row(j).transpose().normalize()).collect())
}

/// Center with `c . m_j` equal for all inward normals `m_j`: solve `N x = 1`
/// and normalize, so `sin r = 1 / |x|`.
pub fn spherical_inradius(s: &SphericalSimplex) -> Result<(DVector<f64>, f64), SimplexError> {
    let normals = inward_normals(s)?;
    let m = normals.len();
    let nmat = DMatrix::from_fn(m, m, |i, j| normals[i][j]);
    let x = nmat
        .lu()
        .solve(&DVector::from_element(m, 1.0))
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(|| SimplexError::Conditioning("singular normal matrix".into()))?;
    let norm = x.norm();
    Ok((x / norm, (1.0 / norm).asin()))
}

/// Reflection taking unit vector `c` to the last basis vector.
fn householder_to_last(c: &DVector<f64>) -> DMatrix<f64> {
    let m = c.len();
    let mut e = DVector::zeros(m);
    e[m - 1] = 1.0;
    let w = c - &e;
    let wn = w.norm_squared();
    if wn < 1e-30 {
        return DMatrix::identity(m, m);
    }
    DMatrix::identity(m, m) - (&w * w.transpose()) * (2.0 / wn)
}

/// Rotates the circumcenter to the pole and projects centrally onto the
/// tangent hyperplane `x_{n+1} = 1`, dropping the last coordinate.
pub fn gnomonic_project(s: &SphericalSimplex) -> Result<EuclideanSimplex, SimplexError> {
    let (c, _) = spherical_circumradius(s)?;
    let h = householder_to_last(&c);
    let n = s.dimension();
    let projected = s
        .vertices
        .iter()
        .map(|v| {
            let w = &h * v;
            let z = w[n];
            if !(z > 1e-12) {
                return Err(SimplexError::ProjectionDomain(format!("height {z:e} above the tangent plane")));
            }
            Ok(DVector::from_fn(n, |i, _| w[i] / z))
        })
        .collect::<Result<Vec<_>, _>>()?;
    EuclideanSimplex::new(projected)
}

/// `tan R / tan r` against `f` applied to `s(d_ij) = sin(d_ij / 2)` in
/// [`SphericalSimplex::edge_lengths`] order.
pub fn transfer_check(
    f: &dyn Fn(&[f64]) -> f64,
    s: &SphericalSimplex,
) -> Result<InequalityEvaluation, SimplexError> {
    let (_, big) = spherical_circumradius(s)?;
    let (_, small) = spherical_inradius(s)?;
    let edges: Vec<f64> = s.edge_lengths().iter().map(|&d| Geometry::Spherical.s(d)).collect();
    Ok(InequalityEvaluation::new(big.tan() / small.tan(), f(&edges)))
}

/// Standard normal vertices, rejected when nearly degenerate.
pub fn sample_euclidean_simplex(n: usize, seed: u64, stream_index: u64) -> Result<EuclideanSimplex, SimplexError> {
    let mut rng = stream_rng(seed, stream_index);
    for _ in 0..REJECTION_BUDGET {
        let vs: Vec<DVector<f64>> =
            (0..=n).map(|_| DVector::from_fn(n, |_, _| rng.sample(StandardNormal))).collect();
        let scale = max_edge(&vs);
        if cayley_menger_volume(&vs) < 1e-6 * scale.powi(n as i32) {
            continue;
        }
        if let Ok(s) = EuclideanSimplex::new(vs) {
            return Ok(s);
        }
    }
    Err(SimplexError::RejectionBudgetExceeded { attempts: REJECTION_BUDGET })
}

/// Uniform point on the cap of half-angle `cap` around the last axis of
/// `(n+1)`-space, by rejection from the sphere.
fn uniform_on_cap<R: Rng>(rng: &mut R, n: usize, cap: f64) -> DVector<f64> {
    let cos_cap = cap.cos();
    loop {
        let g = DVector::from_fn(n + 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm == 0.0 {
            continue;
        }
        let v = g / norm;
        if v[n] >= cos_cap {
            return v;
        }
    }
}

/// Vertices uniform in a cap of half-angle [`SPHERICAL_CAP`], rejected unless
/// the circumradius is below [`SPHERICAL_R_LIMIT`].
pub fn sample_spherical_simplex(n: usize, seed: u64, stream_index: u64) -> Result<SphericalSimplex, SimplexError> {
    let mut rng = stream_rng(seed, stream_index);
    for _ in 0..REJECTION_BUDGET {
        let vs: Vec<DVector<f64>> = (0..=n).map(|_| uniform_on_cap(&mut rng, n, SPHERICAL_CAP)).collect();
        let Ok(s) = SphericalSimplex::new(vs) else { continue };
        let Ok((_, r)) = spherical_circumradius(&s) else { continue };
        if r < SPHERICAL_R_LIMIT && gnomonic_project(&s).is_ok() {
            return Ok(s);
        }
    }
    Err(SimplexError::RejectionBudgetExceeded { attempts: REJECTION_BUDGET })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexResult {
    pub dimension: usize,
    pub geometry: Geometry,
    pub seed: u64,
    pub samples: usize,
    pub violations: usize,
    /// Smallest normalized gap of `R - n r` or `tan R - n tan r`.
    pub min_normalized_gap: f64,
    /// Normalized gap on the regular (Euclidean) or orthant (spherical) simplex.
    pub equality_gap: f64,
    /// Spherical only: violations of `r' >= tan r` for the projected simplex.
    pub projection_violations: usize,
    /// Spherical only: smallest `r' - tan r`.
    pub projection_min_gap: Option<f64>,
    pub passed: bool,
}

struct SimplexSample {
    eval: InequalityEvaluation,
    projection_gap: Option<f64>,
}

fn euclidean_sample(n: usize, seed: u64, i: u64) -> Result<SimplexSample, SimplexError> {
    let s = sample_euclidean_simplex(n, seed, i)?;
    let (_, big) = euclidean_circumradius(&s)?;
    let (_, small) = euclidean_inradius(&s)?;
    Ok(SimplexSample { eval: InequalityEvaluation::new(big, n as f64 * small), projection_gap: None })
}

fn spherical_sample(n: usize, seed: u64, i: u64) -> Result<SimplexSample, SimplexError> {
    let s = sample_spherical_simplex(n, seed, i)?;
    let (_, big) = spherical_circumradius(&s)?;
    let (_, small) = spherical_inradius(&s)?;
    let (_, projected_r) = euclidean_inradius(&gnomonic_project(&s)?)?;
    Ok(SimplexSample {
        eval: InequalityEvaluation::new(big.tan(), n as f64 * small.tan()),
        projection_gap: Some(projected_r - small.tan()),
    })
}

/// Checks the n-dimensional Euler inequality on `count` random simplices.
pub fn verify_simplex_euler(
    kind: Geometry,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<SimplexResult, SimplexError> {
    if n < 2 {
        return Err(SimplexError::InvalidInput(format!("dimension {n} is below 2")));
    }
    if count == 0 {
        return Err(SimplexError::InvalidInput("count must be at least 1".into()));
    }
    let equality_gap = match kind {
        Geometry::Euclidean => {
            let s = EuclideanSimplex::regular(n, 1.0)?;
            let big = euclidean_circumradius(&s)?.1;
            InequalityEvaluation::new(big, n as f64 * euclidean_inradius(&s)?.1).normalized_gap()
        }
        Geometry::Spherical => transfer_check(&|_| n as f64, &SphericalSimplex::orthant(n))?.normalized_gap(),
        Geometry::Hyperbolic => {
            return Err(SimplexError::InvalidInput("hyperbolic simplices are not supported".into()))
        }
    };
    let samples: Vec<SimplexSample> = (0..count as u64)
        .into_par_iter()
        .map(|i| match kind {
            Geometry::Euclidean => euclidean_sample(n, seed, i),
            _ => spherical_sample(n, seed, i),
        })
        .collect::<Result<_, _>>()?;

    let violations = samples.iter().filter(|s| !s.eval.holds).count();
    let min_normalized_gap = samples.iter().map(|s| s.eval.normalized_gap()).fold(f64::INFINITY, f64::min);
    let projection_min_gap = samples.iter().filter_map(|s| s.projection_gap).reduce(f64::min);
    let projection_violations =
        samples.iter().filter(|s| s.projection_gap.is_some_and(|g| g < -PROJECTION_TOLERANCE)).count();
    Ok(SimplexResult {
        dimension: n,
        geometry: kind,
        seed,
        samples: count,
        violations,
        min_normalized_gap,
        equality_gap,
        projection_violations,
        projection_min_gap,
        passed: violations == 0 && projection_violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{circumradius_functional, inradius_functional, Vertices};
    use crate::inequality::Registry;
    use crate::oracle::EmbeddedTriangle;
    use nalgebra::Vector3;

    fn dv(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn regular_simplex_radii() {
        for n in 2..=5 {
            let s = EuclideanSimplex::regular(n, 1.0).unwrap();
            let (_, big) = euclidean_circumradius(&s).unwrap();
            let (_, small) = euclidean_inradius(&s).unwrap();
            let expected = (n as f64 / (2.0 * (n + 1) as f64)).sqrt();
            assert!((big - expected).abs() < 1e-12, "n = {n}: {big} vs {expected}");
            assert!((big - n as f64 * small).abs() <= 1e-9 * big);
        }
    }

    #[test]
    fn right_triangle_as_simplex() {
        let s = EuclideanSimplex::new(vec![dv(&[0.0, 0.0]), dv(&[3.0, 0.0]), dv(&[0.0, 4.0])]).unwrap();
        assert!((euclidean_circumradius(&s).unwrap().1 - 2.5).abs() < 1e-14);
        let (c, r) = euclidean_inradius(&s).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        assert!((c - dv(&[1.0, 1.0])).norm() < 1e-14);
        assert!((s.volume() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn random_simplex_self_consistency() {
        let s = sample_euclidean_simplex(4, 3, 0).unwrap();
        let (c, big) = euclidean_circumradius(&s).unwrap();
        for v in s.vertices() {
            assert!(((v - &c).norm() - big).abs() < 1e-10);
        }
        let (ic, small) = euclidean_inradius(&s).unwrap();
        assert!(small > 0.0 && small < big);
        for d in facet_distances(&s, &ic).unwrap() {
            assert!((d - small).abs() < 1e-10, "{d} vs {small}");
        }
    }

    #[test]
    fn degenerate_simplex_rejected() {
        let err = EuclideanSimplex::new(vec![dv(&[0.0, 0.0]), dv(&[1.0, 0.0]), dv(&[2.0, 0.0])]).unwrap_err();
        assert!(matches!(err, SimplexError::Conditioning(_)));
        assert!(EuclideanSimplex::new(vec![dv(&[0.0, 0.0]), dv(&[1.0, 0.0])]).is_err());
    }

    #[test]
    fn orthant_radii() {
        for n in 2..=5 {
            let s = SphericalSimplex::orthant(n);
            let (c, big) = spherical_circumradius(&s).unwrap();
            let (ic, small) = spherical_inradius(&s).unwrap();
            let diag = DVector::from_element(n + 1, 1.0 / ((n + 1) as f64).sqrt());
            assert!((c - &diag).norm() < 1e-14 && (ic - &diag).norm() < 1e-14);
            assert!((big.tan() - (n as f64).sqrt()).abs() < 1e-12);
            assert!((small.tan() - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
            let e = transfer_check(&|_| n as f64, &s).unwrap();
            assert!(e.normalized_gap().abs() < 1e-9);
        }
    }

    #[test]
    fn random_spherical_simplex_self_consistency() {
        let s = sample_spherical_simplex(3, 8, 2).unwrap();
        let (c, _) = spherical_circumradius(&s).unwrap();
        let dots: Vec<f64> = s.vertices().iter().map(|v| c.dot(v)).collect();
        assert!(dots.iter().all(|d| (d - dots[0]).abs() < 1e-12));
        let (ic, small) = spherical_inradius(&s).unwrap();
        for m in inward_normals(&s).unwrap() {
            assert!((ic.dot(&m).asin() - small).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_scales_edges() {
        let s = sample_spherical_simplex(3, 5, 1).unwrap();
        let (_, big) = spherical_circumradius(&s).unwrap();
        let p = gnomonic_project(&s).unwrap();
        let (_, pr) = euclidean_circumradius(&p).unwrap();
        assert!((pr - big.tan()).abs() < 1e-10);
        let k = 2.0 / big.cos();
        let mut idx = 0;
        let edges = s.edge_lengths();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let e = (&p.vertices()[i] - &p.vertices()[j]).norm();
                assert!((e / (k * (0.5 * edges[idx]).sin()) - 1.0).abs() < 1e-10);
                idx += 1;
            }
        }
    }

    #[test]
    fn orthant_projects_to_equilateral() {
        let p = gnomonic_project(&SphericalSimplex::orthant(2)).unwrap();
        let (_, pr) = euclidean_circumradius(&p).unwrap();
        assert!((pr - 2f64.sqrt()).abs() < 1e-12);
        let v = p.vertices();
        let d = [(&v[0] - &v[1]).norm(), (&v[1] - &v[2]).norm(), (&v[0] - &v[2]).norm()];
        assert!((d[0] - d[1]).abs() < 1e-12 && (d[1] - d[2]).abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_reduction_matches_triangles() {
        for i in 0..20 {
            let s = sample_spherical_simplex(2, 77, i).unwrap();
            let v = s.vertices();
            let tri = Vertices::Sphere([0, 1, 2].map(|k| Vector3::new(v[k][0], v[k][1], v[k][2])));
            let t = EmbeddedTriangle::new(tri).unwrap().sides;
            let (_, big) = spherical_circumradius(&s).unwrap();
            let (_, small) = spherical_inradius(&s).unwrap();
            assert!((big.tan() - circumradius_functional(&t).value).abs() < 1e-9);
            assert!((small.tan() - inradius_functional(&t).value).abs() < 1e-9);

            let eq6 = Registry::builtin().lookup("eq6-left").unwrap().evaluate(&t)[0];
            let q = |x: &[f64]| {
                let (a, b, c) = (x[0], x[1], x[2]);
                let p = a * b + b * c + c * a;
                2.0 * (a + b + c) * (a.powi(3) + b.powi(3) + c.powi(3)) / (p * p)
            };
            let tc = transfer_check(&q, &s).unwrap();
            assert!((tc.lhs - eq6.lhs).abs() < 1e-9 && (tc.rhs - eq6.rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn small_batches_pass() {
        for n in [2, 4] {
            assert!(verify_simplex_euler(Geometry::Euclidean, n, 100, 1).unwrap().passed);
            let r = verify_simplex_euler(Geometry::Spherical, n, 100, 1).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.equality_gap.abs() < 1e-9);
        }
        assert!(verify_simplex_euler(Geometry::Hyperbolic, 3, 10, 1).is_err());
    }
}
