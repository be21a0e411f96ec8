//! Transporting Euclidean triangle inequalities to curved geometries.
//!
//! A [`HomogeneousPair`] encodes a Euclidean inequality `f(R, r) >= g(a, b, c)`
//! with `f` and `g` homogeneous of the same degree `n`. If
//! `h(x) = f(2M^2/x, x)` is decreasing on `(0, M]` the inequality carries over
//! to the sphere as
//!
//! ```text
//! f(tan R, tan r) >= 2^n g(s(a), s(b), s(c)) ((s(a)+s(b)+s(c)) / s(a+b+c))^(n/2)
//! ```
//!
//! and if `h` is increasing it carries over to the hyperbolic plane with
//! `tanh` in place of `tan`. [`classify_monotonicity`] certifies the sign of
//! `h` numerically and [`generalize`] refuses to transport a pair whose class
//! does not match the target geometry.

mod registry;
mod search;
mod verify;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{circumradius_functional, inradius_functional, Geometry, Triangle};
use crate::oracle::OracleError;
use crate::sampling::{sample_triangle, stream_rng, SamplerConfig};

pub use registry::{eq5_middle, registry_builtin, Registry};
pub use search::{
    scan_default, scan_triangles, search_counterexample, CounterexampleRecord, Provenance, SearchOutcome,
    REVERIFY_TOLERANCE,
};
pub use verify::{
    adversarial_probes, equilateral_probes, spread_probes, verify_inequality, EqualityProbe, LinkSummary,
    VerificationResult, VerifyOptions, EQUALITY_TOLERANCE, PROBE_SCALES, STRICT_GAP_THRESHOLD,
};

/// Relative floor below which a negative gap still counts as holding.
pub const HOLDS_FLOOR: f64 = 1e-12;
/// Default grid size of the monotonicity classifier.
pub const DEFAULT_GRID_SIZE: usize = 512;
/// Lower end of the classifier grid, as a fraction of `M`.
pub const GRID_EPSILON: f64 = 1e-4;

pub type PairFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SideFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type TriangleFn = Arc<dyn Fn(&Triangle) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InequalityError {
    #[error("'{name}' is not homogeneous of degree {degree}: {detail}")]
    NotHomogeneous { name: String, degree: i32, detail: String },
    #[error("Euclidean base of '{name}' fails on sides {sides:?} (gap {gap:e})")]
    BaseViolated { name: String, sides: [f64; 3], gap: f64 },
    #[error("'{name}' claims {claimed:?} but classifies as {found:?}")]
    ClassMismatch { name: String, claimed: Monotonicity, found: Monotonicity },
    #[error("theorem precondition fails for '{name}' in {geometry}: h is {class:?}")]
    TheoremPrecondition { name: String, geometry: Geometry, class: Monotonicity },
    #[error("non-finite value while evaluating {0}")]
    Evaluation(String),
    #[error("unknown inequality '{0}'")]
    UnknownInequality(String),
    #[error("'{name}' is not claimed to hold in {geometry}")]
    NotApplicable { name: String, geometry: Geometry },
    #[error("evaluator for {expected} applied to a {found} triangle")]
    GeometryMismatch { expected: Geometry, found: Geometry },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("sampling failed at stream {stream_index}: {source}")]
    Sampling { stream_index: u64, source: OracleError },
}

/// Sign class of `h(x) = f(2M^2/x, x)` on `(0, M]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Decreasing,
    Increasing,
    /// Both non-increasing and non-decreasing; transports to either geometry.
    Constant,
    Neither,
}

impl Monotonicity {
    /// Whether the transport theorem applies in `kind` for this class.
    pub fn admits(self, kind: Geometry) -> bool {
        match kind {
            Geometry::Euclidean => true,
            Geometry::Spherical => matches!(self, Monotonicity::Decreasing | Monotonicity::Constant),
            Geometry::Hyperbolic => matches!(self, Monotonicity::Increasing | Monotonicity::Constant),
        }
    }
}

/// A Euclidean inequality `f(R, r) >= g(a, b, c)` with its homogeneity degree.
#[derive(Clone)]
pub struct HomogeneousPair {
    pub name: String,
    f: PairFn,
    g: SideFn,
    pub degree: i32,
    pub claimed_class: Option<Monotonicity>,
    pub equality_iff_equilateral: bool,
}

impl fmt::Debug for HomogeneousPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomogeneousPair")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("claimed_class", &self.claimed_class)
            .field("equality_iff_equilateral", &self.equality_iff_equilateral)
            .finish()
    }
}

impl HomogeneousPair {
    /// Registers a pair after checking homogeneity, the claimed class and the
    /// Euclidean base on random triangles.
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        degree: i32,
        claimed_class: Option<Monotonicity>,
        equality_iff_equilateral: bool,
    ) -> Result<Self, InequalityError> {
        let pair = HomogeneousPair {
            name: name.into(),
            f: Arc::new(f),
            g: Arc::new(g),
            degree,
            claimed_class,
            equality_iff_equilateral,
        };
        pair.check_homogeneity()?;
        if let Some(claimed) = claimed_class {
            let found = classify_monotonicity(&*pair.f, degree, DEFAULT_GRID_SIZE)?;
            if found != claimed {
                return Err(InequalityError::ClassMismatch { name: pair.name.clone(), claimed, found });
            }
        }
        pair.euclidean_self_test(512, 0x5eed)?;
        Ok(pair)
    }

    pub fn f(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    pub fn g(&self, x: f64, y: f64, z: f64) -> f64 {
        (self.g)(x, y, z)
    }

    /// The classifier's verdict for this pair's `f`.
    pub fn classify(&self) -> Result<Monotonicity, InequalityError> {
        classify_monotonicity(&*self.f, self.degree, DEFAULT_GRID_SIZE)
    }

    fn check_homogeneity(&self) -> Result<(), InequalityError> {
        let mut rng = stream_rng(0x401, 0);
        let n = self.degree;
        for _ in 0..64 {
            let lambda: f64 = rng.random_range(0.1..10.0);
            let scale = lambda.powi(n);
            let (x, y) = (rng.random_range(0.1..5.0), rng.random_range(0.1..5.0));
            let [p, q, r] = [(); 3].map(|_| rng.random_range(0.1..5.0));
            let checks = [
                ("f", self.f(lambda * x, lambda * y), scale * self.f(x, y)),
                ("g", self.g(lambda * p, lambda * q, lambda * r), scale * self.g(p, q, r)),
            ];
            for (which, scaled, expected) in checks {
                let tol = 1e-9 * scaled.abs().max(expected.abs()).max(f64::MIN_POSITIVE);
                if !((scaled - expected).abs() <= tol) {
                    return Err(InequalityError::NotHomogeneous {
                        name: self.name.clone(),
                        degree: n,
                        detail: format!("{which}: lambda = {lambda}, {scaled} vs {expected}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Checks `f(R, r) >= g(a, b, c)` on `samples` random Euclidean triangles.
    pub fn euclidean_self_test(&self, samples: usize, seed: u64) -> Result<(), InequalityError> {
        let cfg = SamplerConfig::for_geometry(Geometry::Euclidean, seed, samples);
        for i in 0..samples as u64 {
            let t = sample_triangle(Geometry::Euclidean, &cfg, i)
                .map_err(|source| InequalityError::Sampling { stream_index: i, source })?
                .sides;
            let (lhs, rhs) = self.base_sides(&t);
            let e = InequalityEvaluation::new(lhs, rhs);
            if !e.holds {
                return Err(InequalityError::BaseViolated {
                    name: self.name.clone(),
                    sides: t.sides(),
                    gap: e.gap,
                });
            }
        }
        Ok(())
    }

    fn base_sides(&self, t: &Triangle) -> (f64, f64) {
        let r_big = circumradius_functional(t).value;
        let r_small = inradius_functional(t).value;
        let [a, b, c] = t.sides();
        (self.f(r_big, r_small), self.g(a, b, c))
    }
}

/// One side-by-side comparison `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityEvaluation {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
}

impl InequalityEvaluation {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self::with_floor(lhs, rhs, HOLDS_FLOOR)
    }

    /// `holds` iff `gap >= -floor * max(|lhs|, |rhs|, 1)`.
    pub fn with_floor(lhs: f64, rhs: f64, floor: f64) -> Self {
        let gap = lhs - rhs;
        let holds = gap >= -floor * lhs.abs().max(rhs.abs()).max(1.0);
        InequalityEvaluation { lhs, rhs, gap, holds }
    }

    /// `gap / max(|lhs|, |rhs|, 1)`.
    pub fn normalized_gap(&self) -> f64 {
        self.gap / self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }

    pub fn is_finite(&self) -> bool {
        self.lhs.is_finite() && self.rhs.is_finite()
    }
}

/// Certifies the sign class of `h(x) = f(2M^2/x, x)` on a log-spaced grid over
/// `[eps M, M]`, for several `M`, cross-checking homogeneity between them.
pub fn classify_monotonicity(
    f: &dyn Fn(f64, f64) -> f64,
    degree: i32,
    grid_size: usize,
) -> Result<Monotonicity, InequalityError> {
    if grid_size < 64 {
        return Err(InequalityError::InvalidArgument(format!("grid_size {grid_size} is below 64")));
    }
    let base_m = 1.0;
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| GRID_EPSILON.powf(1.0 - i as f64 / (grid_size - 1) as f64))
        .collect();
    let h = |m: f64, x: f64| f(2.0 * m * m / x, x);
    let base: Vec<f64> = grid.iter().map(|&x| h(base_m, x * base_m)).collect();
    if let Some(bad) = base.iter().position(|v| !v.is_finite()) {
        return Err(InequalityError::Evaluation(format!("h at x = {}", grid[bad])));
    }
    let class = sign_class(&base);
    for m in [0.37_f64, 2.9] {
        let scale = m.powi(degree);
        let values: Vec<f64> = grid.iter().map(|&x| h(m, x * m)).collect();
        for (v, b) in values.iter().zip(&base) {
            if !v.is_finite() {
                return Err(InequalityError::Evaluation(format!("h with M = {m}")));
            }
            if (v - scale * b).abs() > 1e-9 * v.abs().max((scale * b).abs()).max(f64::MIN_POSITIVE) {
                return Err(InequalityError::NotHomogeneous {
                    name: "f".into(),
                    degree,
                    detail: format!("h_M disagrees with M^n h_1 at M = {m}"),
                });
            }
        }
        if sign_class(&values) != class {
            return Ok(Monotonicity::Neither);
        }
    }
    Ok(class)
}

fn sign_class(values: &[f64]) -> Monotonicity {
    let (mut up, mut down) = (false, false);
    for w in values.windows(2) {
        let delta = w[1] - w[0];
        let noise = 1e-12 * w[0].abs().max(w[1].abs());
        if delta > noise {
            up = true;
        } else if delta < -noise {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => Monotonicity::Constant,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (true, true) => Monotonicity::Neither,
    }
}

/// Transported form of `pair` in `kind`, evaluated without checking the
/// theorem's precondition. The Euclidean branch is the base inequality.
pub fn transport(pair: &HomogeneousPair, t: &Triangle) -> (f64, f64) {
    if t.kind() == Geometry::Euclidean {
        return pair.base_sides(t);
    }
    let rho_big = circumradius_functional(t).value;
    let rho_small = inradius_functional(t).value;
    let [x, y, z] = t.shadow_sides();
    let n = pair.degree as f64;
    let correction = (0.5 * n * t.perimeter_ratio().ln()).exp();
    let rhs = 2f64.powi(pair.degree) * pair.g(x, y, z) * correction;
    (pair.f(rho_big, rho_small), rhs)
}

/// Evaluator produced by [`generalize`].
#[derive(Debug, Clone)]
pub struct Transported {
    pair: HomogeneousPair,
    kind: Geometry,
}

impl Transported {
    pub fn kind(&self) -> Geometry {
        self.kind
    }

    pub fn pair(&self) -> &HomogeneousPair {
        &self.pair
    }

    pub fn evaluate(&self, t: &Triangle) -> Result<InequalityEvaluation, InequalityError> {
        if t.kind() != self.kind {
            return Err(InequalityError::GeometryMismatch { expected: self.kind, found: t.kind() });
        }
        let (lhs, rhs) = transport(&self.pair, t);
        Ok(InequalityEvaluation::new(lhs, rhs))
    }
}

/// Builds the transported evaluator after certifying the monotonicity class
/// required by `kind`.
pub fn generalize(pair: &HomogeneousPair, kind: Geometry) -> Result<Transported, InequalityError> {
    let class = pair.classify()?;
    if !class.admits(kind) {
        return Err(InequalityError::TheoremPrecondition { name: pair.name.clone(), geometry: kind, class });
    }
    Ok(Transported { pair: pair.clone(), kind })
}

/// One comparison inside a registered inequality.
#[derive(Clone)]
pub enum Link {
    /// `f(rho(R), rho(r))` against the transported `g`.
    Pair(HomogeneousPair),
    /// A side-only inequality `lhs(a,b,c) >= rhs(a,b,c)`, evaluated on
    /// `s(a), s(b), s(c)` outside the Euclidean plane.
    Sides { label: String, lhs: SideFn, rhs: SideFn },
    /// Arbitrary functionals of the triangle.
    Direct { label: String, lhs: TriangleFn, rhs: TriangleFn },
}

impl fmt::Debug for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Link::Pair(p) => write!(f, "Pair({})", p.name),
            Link::Sides { label, .. } => write!(f, "Sides({label})"),
            Link::Direct { label, .. } => write!(f, "Direct({label})"),
        }
    }
}

impl Link {
    pub fn sides(
        label: impl Into<String>,
        lhs: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        rhs: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Link::Sides { label: label.into(), lhs: Arc::new(lhs), rhs: Arc::new(rhs) }
    }

    pub fn direct(
        label: impl Into<String>,
        lhs: impl Fn(&Triangle) -> f64 + Send + Sync + 'static,
        rhs: impl Fn(&Triangle) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Link::Direct { label: label.into(), lhs: Arc::new(lhs), rhs: Arc::new(rhs) }
    }

    pub fn label(&self) -> &str {
        match self {
            Link::Pair(p) => &p.name,
            Link::Sides { label, .. } | Link::Direct { label, .. } => label,
        }
    }

    pub fn lhs_rhs(&self, t: &Triangle) -> (f64, f64) {
        match self {
            Link::Pair(p) => transport(p, t),
            Link::Sides { lhs, rhs, .. } => {
                let [x, y, z] =
                    if t.kind() == Geometry::Euclidean { t.sides() } else { t.shadow_sides() };
                (lhs(x, y, z), rhs(x, y, z))
            }
            Link::Direct { lhs, rhs, .. } => (lhs(t), rhs(t)),
        }
    }
}

/// Why an inequality is expected to hold in a geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// The Euclidean original.
    EuclideanBase,
    /// The monotonicity transport theorem (certified at registration).
    TransportTheorem,
    /// Side-only inequality carried over by substituting `s(a), s(b), s(c)`.
    SideSubstitution,
    /// A known result stated directly for that geometry.
    Cited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub geometry: Geometry,
    pub basis: Basis,
}

/// A named inequality or chain of inequalities.
#[derive(Debug, Clone)]
pub struct Inequality {
    pub name: String,
    pub description: String,
    pub links: Vec<Link>,
    pub claims: Vec<Claim>,
    /// Equality exactly at equilateral triangles; otherwise only tightness
    /// at equilateral triangles is expected.
    pub equality_iff_equilateral: bool,
}

impl Inequality {
    pub fn claim(&self, kind: Geometry) -> Option<Basis> {
        self.claims.iter().find(|c| c.geometry == kind).map(|c| c.basis)
    }

    pub fn holds_in(&self, kind: Geometry) -> bool {
        self.claim(kind).is_some()
    }

    /// Evaluates every link in the triangle's own geometry, claimed or not.
    pub fn evaluate(&self, t: &Triangle) -> Vec<InequalityEvaluation> {
        self.evaluate_with_floor(t, HOLDS_FLOOR)
    }

    pub fn evaluate_with_floor(&self, t: &Triangle, floor: f64) -> Vec<InequalityEvaluation> {
        self.links
            .iter()
            .map(|link| {
                let (lhs, rhs) = link.lhs_rhs(t);
                InequalityEvaluation::with_floor(lhs, rhs, floor)
            })
            .collect()
    }
}

/// Evaluates each adjacent link of a chain in a geometry where it is claimed.
pub fn evaluate_chain(
    chain: &Inequality,
    t: &Triangle,
) -> Result<Vec<InequalityEvaluation>, InequalityError> {
    if !chain.holds_in(t.kind()) {
        return Err(InequalityError::NotApplicable { name: chain.name.clone(), geometry: t.kind() });
    }
    let evals = chain.evaluate(t);
    if let Some(bad) = evals.iter().position(|e| !e.is_finite()) {
        return Err(InequalityError::Evaluation(format!("{} link {bad}", chain.name)));
    }
    Ok(evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_pair() -> HomogeneousPair {
        HomogeneousPair::new("euler", |x, y| x / y, |_, _, _| 2.0, 0, Some(Monotonicity::Decreasing), true)
            .unwrap()
    }

    #[test]
    fn classifier_reproduces_hand_classifications() {
        let cls = |f: &dyn Fn(f64, f64) -> f64, n| classify_monotonicity(f, n, 512).unwrap();
        assert_eq!(cls(&|x, y| x / y, 0), Monotonicity::Decreasing);
        assert_eq!(cls(&|x, y| 2.0 * x * x + y * y, 2), Monotonicity::Decreasing);
        assert_eq!(cls(&|x, y| -3.0 * y * (2.0 * x - y), 2), Monotonicity::Increasing);
        assert_eq!(cls(&|_, y| 1.0 / (4.0 * y * y), -2), Monotonicity::Decreasing);
        assert_eq!(cls(&|x, y| -1.0 / (2.0 * x * y), -2), Monotonicity::Constant);
        // h(x) = 4M^4/x^2 + 40x^2 turns at x = M / 10^(1/4).
        assert_eq!(cls(&|x, y| x * x + 40.0 * y * y, 2), Monotonicity::Neither);
    }

    #[test]
    fn classifier_rejects_bad_inputs() {
        assert!(matches!(
            classify_monotonicity(&|x, y| x / y, 0, 10),
            Err(InequalityError::InvalidArgument(_))
        ));
        assert!(matches!(
            classify_monotonicity(&|x, _| (x - 2.0).ln(), 0, 64),
            Err(InequalityError::Evaluation(_)) | Err(InequalityError::NotHomogeneous { .. })
        ));
        assert!(matches!(
            classify_monotonicity(&|x, y| x + y * y, 1, 64),
            Err(InequalityError::NotHomogeneous { .. })
        ));
    }

    #[test]
    fn registration_checks() {
        let err = HomogeneousPair::new("bad", |x, y| x + y * y, |a, _, _| a, 1, None, false).unwrap_err();
        assert!(matches!(err, InequalityError::NotHomogeneous { .. }));
        // R/r >= 3 is false near equilateral triangles.
        let err = HomogeneousPair::new("false", |x, y| x / y, |_, _, _| 3.0, 0, None, false).unwrap_err();
        assert!(matches!(err, InequalityError::BaseViolated { .. }));
        let err = HomogeneousPair::new(
            "wrong-class",
            |x, y| x / y,
            |_, _, _| 2.0,
            0,
            Some(Monotonicity::Increasing),
            true,
        )
        .unwrap_err();
        assert!(matches!(err, InequalityError::ClassMismatch { .. }));
    }

    #[test]
    fn generalize_checks_precondition() {
        let pair = euler_pair();
        assert!(generalize(&pair, Geometry::Spherical).is_ok());
        assert!(matches!(
            generalize(&pair, Geometry::Hyperbolic),
            Err(InequalityError::TheoremPrecondition { .. })
        ));
        let ev = generalize(&pair, Geometry::Spherical).unwrap();
        let t = Triangle::new(Geometry::Euclidean, 3.0, 4.0, 5.0).unwrap();
        assert!(matches!(ev.evaluate(&t), Err(InequalityError::GeometryMismatch { .. })));
    }

    #[test]
    fn evaluation_floor() {
        assert!(InequalityEvaluation::new(1.0, 1.0 + 1e-13).holds);
        assert!(!InequalityEvaluation::new(1.0, 1.0 + 1e-11).holds);
        assert!(InequalityEvaluation::new(1e6, 1e6 * (1.0 + 1e-13)).holds);
        assert!(!InequalityEvaluation::with_floor(1.0, 1.0 + 1e-13, 0.0).holds);
    }
}
