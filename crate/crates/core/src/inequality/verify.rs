//! Batch verification of registered inequalities on sampled triangles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Geometry, Triangle};
use crate::sampling::{sample_triangle, SamplerConfig};

use super::search::{CounterexampleRecord, Provenance};
use super::{Basis, Inequality, InequalityError, InequalityEvaluation, Registry, HOLDS_FLOOR};

/// Side lengths of the exact equilateral probes.
pub const PROBE_SCALES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
/// Largest normalized gap accepted as equality on an equilateral probe.
pub const EQUALITY_TOLERANCE: f64 = 1e-10;
/// Smallest normalized gap expected on probes with side spread at least 0.1.
pub const STRICT_GAP_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub floor: f64,
    /// Adds near-degenerate and near-equilateral probes to the random batch.
    pub adversarial: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { floor: HOLDS_FLOOR, adversarial: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityProbe {
    pub side: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub normalized_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSummary {
    pub label: String,
    pub violations: usize,
    pub min_gap: f64,
    pub min_normalized_gap: f64,
    /// Normalized gap at the sample with the smallest relative side spread.
    pub most_equilateral_gap: f64,
    pub equality_probes: Vec<EqualityProbe>,
    pub equality_probe_max_gap: f64,
    /// Smallest normalized gap over [`spread_probes`].
    pub strict_probe_min_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub inequality: String,
    pub geometry: Geometry,
    pub basis: Basis,
    pub seed: u64,
    pub samples: usize,
    pub adversarial_probes: usize,
    pub violations: usize,
    pub links: Vec<LinkSummary>,
    pub first_violation: Option<CounterexampleRecord>,
    pub passed: bool,
}

impl VerificationResult {
    /// Whether every link with an equality case is tight on the equilateral
    /// probes.
    pub fn equality_ok(&self, ineq: &Inequality) -> bool {
        !ineq.equality_iff_equilateral
            || self.links.iter().all(|l| l.equality_probe_max_gap <= EQUALITY_TOLERANCE)
    }
}

/// Exact equilateral triangles at [`PROBE_SCALES`].
pub fn equilateral_probes(kind: Geometry) -> Vec<Triangle> {
    PROBE_SCALES
        .iter()
        .map(|&x| Triangle::new(kind, x, x, x).expect("equilateral probes are valid"))
        .collect()
}

/// Triangles whose largest minus smallest side is 0.1.
pub fn spread_probes(kind: Geometry) -> Vec<Triangle> {
    let mut out = Vec::new();
    for x in [0.3, 0.7, 1.2] {
        for (db, dc) in [(0.0, 0.1), (0.1, 0.1), (0.05, 0.1)] {
            if let Ok(t) = Triangle::new(kind, x, x + db, x + dc) {
                out.push(t);
            }
        }
    }
    out
}

/// Slivers and near-equilateral triangles that random sampling rarely hits.
pub fn adversarial_probes(kind: Geometry) -> Vec<Triangle> {
    let mut out = Vec::new();
    for x in [0.05, 0.5, 1.0] {
        for eps in [1e-2_f64, 1e-4, 1e-6, 1e-8] {
            let sides = [
                [x, x, x * (1.0 + eps)],
                [x, x * (1.0 + eps), x * (1.0 - eps)],
                [x, x, x * (2.0 - eps)],
                [x, x * (1.0 + eps), x * (2.0 + eps - eps * eps)],
                [x, x * eps.sqrt(), x],
            ];
            out.extend(sides.iter().filter_map(|&[a, b, c]| Triangle::new(kind, a, b, c).ok()));
        }
    }
    out
}

struct Sample {
    stream_index: Option<u64>,
    triangle: Triangle,
    evals: Vec<InequalityEvaluation>,
}

fn relative_spread(t: &Triangle) -> f64 {
    let s = t.sides();
    let max = s.iter().cloned().fold(f64::MIN, f64::max);
    t.spread() / max
}

fn probe_summary(ineq: &Inequality, probes: &[Triangle], floor: f64) -> Vec<Vec<EqualityProbe>> {
    let mut per_link = vec![Vec::new(); ineq.links.len()];
    for t in probes {
        for (k, e) in ineq.evaluate_with_floor(t, floor).iter().enumerate() {
            per_link[k].push(EqualityProbe {
                side: t.a(),
                lhs: e.lhs,
                rhs: e.rhs,
                normalized_gap: e.normalized_gap(),
            });
        }
    }
    per_link
}

/// Samples `cfg.count` triangles in `kind`, evaluates every link of `name`
/// and aggregates gaps, violations and probe results.
pub fn verify_inequality(
    reg: &Registry,
    name: &str,
    kind: Geometry,
    cfg: &SamplerConfig,
    opts: &VerifyOptions,
) -> Result<VerificationResult, InequalityError> {
    let ineq = reg.lookup(name)?;
    let basis = ineq
        .claim(kind)
        .ok_or_else(|| InequalityError::NotApplicable { name: name.to_string(), geometry: kind })?;

    let evaluate = |stream_index: Option<u64>, t: Triangle| -> Result<Sample, InequalityError> {
        let evals = ineq.evaluate_with_floor(&t, opts.floor);
        if let Some(k) = evals.iter().position(|e| !e.is_finite()) {
            return Err(InequalityError::Evaluation(format!(
                "{name} link {k} on {kind} sides {:?} (stream {stream_index:?})",
                t.sides()
            )));
        }
        Ok(Sample { stream_index, triangle: t, evals })
    };

    let mut samples: Vec<Sample> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|i| {
            let t = sample_triangle(kind, cfg, i)
                .map_err(|source| InequalityError::Sampling { stream_index: i, source })?
                .sides;
            evaluate(Some(i), t)
        })
        .collect::<Result<_, _>>()?;

    let adversarial = if opts.adversarial { adversarial_probes(kind) } else { Vec::new() };
    let adversarial_count = adversarial.len();
    for t in adversarial {
        samples.push(evaluate(None, t)?);
    }

    let most_equilateral = samples
        .iter()
        .take(cfg.count)
        .min_by(|x, y| relative_spread(&x.triangle).total_cmp(&relative_spread(&y.triangle)))
        .expect("count is at least 1");

    let equality = probe_summary(ineq, &equilateral_probes(kind), opts.floor);
    let strict = probe_summary(ineq, &spread_probes(kind), opts.floor);

    let mut links: Vec<LinkSummary> = ineq
        .links
        .iter()
        .enumerate()
        .map(|(k, link)| LinkSummary {
            label: link.label().to_string(),
            violations: 0,
            min_gap: f64::INFINITY,
            min_normalized_gap: f64::INFINITY,
            most_equilateral_gap: most_equilateral.evals[k].normalized_gap(),
            equality_probe_max_gap: equality[k].iter().map(|p| p.normalized_gap.abs()).fold(0.0, f64::max),
            equality_probes: equality[k].clone(),
            strict_probe_min_gap: strict[k].iter().map(|p| p.normalized_gap).fold(f64::INFINITY, f64::min),
        })
        .collect();

    let mut first_violation = None;
    let mut violations = 0;
    for s in &samples {
        for (k, e) in s.evals.iter().enumerate() {
            let l = &mut links[k];
            l.min_gap = l.min_gap.min(e.gap);
            l.min_normalized_gap = l.min_normalized_gap.min(e.normalized_gap());
            if !e.holds {
                l.violations += 1;
                violations += 1;
                if first_violation.is_none() {
                    first_violation = Some(CounterexampleRecord::new(
                        ineq,
                        k,
                        &s.triangle,
                        *e,
                        Provenance {
                            seed: s.stream_index.map(|_| cfg.seed),
                            stream_index: s.stream_index,
                            refinement_steps: 0,
                        },
                    ));
                }
            }
        }
    }

    Ok(VerificationResult {
        inequality: name.to_string(),
        geometry: kind,
        basis,
        seed: cfg.seed,
        samples: cfg.count,
        adversarial_probes: adversarial_count,
        violations,
        links,
        first_violation,
        passed: violations == 0,
    })
}
