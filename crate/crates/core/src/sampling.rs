//! Deterministic triangle sampling.
//!
//! Each sample owns a ChaCha stream selected by `(seed, stream_index)`, so a
//! batch can be split across workers in any way and still reproduce the
//! same triangles.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Geometry, Vertices};
use crate::oracle::{EmbeddedTriangle, OracleError};

/// Consecutive rejections tolerated before a sampler gives up.
pub const REJECTION_BUDGET: usize = 10_000;

/// Default spherical cap half-angle for vertex sampling.
pub const DEFAULT_CAP_ANGLE: f64 = FRAC_PI_2 - 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub min_side: f64,
    /// Euclidean: diagonal of the sampling box. Hyperbolic: hyperbolic radius
    /// of the centered Klein sub-disk. Spherical: upper bound on sides.
    pub max_side: f64,
    pub count: usize,
    pub cap_angle: f64,
}

impl SamplerConfig {
    /// Defaults used by the verification suites.
    pub fn for_geometry(kind: Geometry, seed: u64, count: usize) -> Self {
        let max_side = match kind {
            Geometry::Euclidean => 10.0,
            Geometry::Spherical => PI,
            Geometry::Hyperbolic => 4.0,
        };
        SamplerConfig { seed, min_side: 1e-3, max_side, count, cap_angle: DEFAULT_CAP_ANGLE }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn validate(&self, kind: Geometry) -> Result<(), OracleError> {
        if !(self.min_side > 0.0) {
            return Err(OracleError::InvalidConfig(format!("min_side {} must be positive", self.min_side)));
        }
        if !(self.max_side > self.min_side) || !self.max_side.is_finite() {
            return Err(OracleError::InvalidConfig(format!(
                "max_side {} must be finite and exceed min_side",
                self.max_side
            )));
        }
        if self.count == 0 {
            return Err(OracleError::InvalidConfig("count must be at least 1".into()));
        }
        match kind {
            Geometry::Spherical if !(self.cap_angle > 0.0 && self.cap_angle < FRAC_PI_2) => {
                Err(OracleError::InvalidConfig(format!(
                    "cap_angle {} must lie in (0, pi/2)",
                    self.cap_angle
                )))
            }
            Geometry::Spherical if self.max_side > PI => Err(OracleError::InvalidConfig(format!(
                "spherical max_side {} exceeds pi",
                self.max_side
            ))),
            Geometry::Hyperbolic if self.max_side > 10.0 => Err(OracleError::InvalidConfig(format!(
                "hyperbolic max_side {} would allow sides beyond the cap",
                self.max_side
            ))),
            _ => Ok(()),
        }
    }
}

/// The random stream owned by one sample.
pub fn stream_rng(seed: u64, stream_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_index);
    rng
}

/// Draws one valid triangle for `(cfg.seed, stream_index)`.
pub fn sample_triangle(
    kind: Geometry,
    cfg: &SamplerConfig,
    stream_index: u64,
) -> Result<EmbeddedTriangle, OracleError> {
    cfg.validate(kind)?;
    let mut rng = stream_rng(cfg.seed, stream_index);
    for _ in 0..REJECTION_BUDGET {
        let vertices = match kind {
            Geometry::Euclidean => {
                let side = cfg.max_side / 2f64.sqrt();
                Vertices::Plane([(); 3].map(|_| {
                    Vector2::new(rng.random::<f64>() * side, rng.random::<f64>() * side)
                }))
            }
            Geometry::Spherical => {
                Vertices::Sphere([(); 3].map(|_| uniform_on_cap(&mut rng, cfg.cap_angle)))
            }
            Geometry::Hyperbolic => {
                let radius = cfg.max_side.tanh();
                Vertices::Klein([(); 3].map(|_| uniform_in_disk(&mut rng, radius)))
            }
        };
        let Ok(e) = EmbeddedTriangle::new(vertices) else { continue };
        let sides = e.sides.sides();
        if sides.iter().any(|&x| x < cfg.min_side) {
            continue;
        }
        if kind == Geometry::Spherical && sides.iter().any(|&x| x > cfg.max_side) {
            continue;
        }
        return Ok(e);
    }
    Err(OracleError::RejectionBudgetExceeded { attempts: REJECTION_BUDGET })
}

/// A hyperbolic triangle whose vertices share one Euclidean radius in the
/// Klein disk, so its circumcenter is the origin.
pub fn sample_centered_klein(cfg: &SamplerConfig, stream_index: u64) -> Result<EmbeddedTriangle, OracleError> {
    cfg.validate(Geometry::Hyperbolic)?;
    let mut rng = stream_rng(cfg.seed, stream_index);
    let max_radius = (0.5 * cfg.max_side).tanh();
    for _ in 0..REJECTION_BUDGET {
        let u = rng.random::<f64>() * max_radius;
        let pts = [(); 3].map(|_| {
            let theta = rng.random::<f64>() * 2.0 * PI;
            Vector2::new(u * theta.cos(), u * theta.sin())
        });
        let Ok(e) = EmbeddedTriangle::new(Vertices::Klein(pts)) else { continue };
        if e.sides.sides().iter().any(|&x| x < cfg.min_side) {
            continue;
        }
        return Ok(e);
    }
    Err(OracleError::RejectionBudgetExceeded { attempts: REJECTION_BUDGET })
}

/// Uniform (area measure) on the cap of half-angle `cap` around `+z`.
pub fn uniform_on_cap<R: Rng>(rng: &mut R, cap: f64) -> Vector3<f64> {
    let z = 1.0 - rng.random::<f64>() * (1.0 - cap.cos());
    let phi = rng.random::<f64>() * 2.0 * PI;
    let rho = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(rho * phi.cos(), rho * phi.sin(), z)
}

/// Uniform (Euclidean area) in the disk of the given radius.
pub fn uniform_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Vector2<f64> {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = rng.random::<f64>() * 2.0 * PI;
    Vector2::new(r * phi.cos(), r * phi.sin())
}
