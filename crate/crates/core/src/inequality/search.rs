//! Counterexample search: random sampling followed by coordinate descent on
//! the side lengths.

use serde::{Deserialize, Serialize};

use crate::geometry::{Geometry, Triangle};
use crate::sampling::{sample_triangle, SamplerConfig};

use super::{Inequality, InequalityError, InequalityEvaluation, Registry, HOLDS_FLOOR};

/// Candidates kept from the random phase for local refinement.
const REFINE_STARTS: usize = 8;
/// Tolerance when re-evaluating a stored counterexample.
pub const REVERIFY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// `None` for hand-built probes.
    pub seed: Option<u64>,
    pub stream_index: Option<u64>,
    pub refinement_steps: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub inequality: String,
    pub geometry: Geometry,
    pub link: usize,
    pub link_label: String,
    pub sides: [f64; 3],
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub normalized_gap: f64,
    pub provenance: Provenance,
}

impl CounterexampleRecord {
    pub fn new(
        ineq: &Inequality,
        link: usize,
        t: &Triangle,
        e: InequalityEvaluation,
        provenance: Provenance,
    ) -> Self {
        CounterexampleRecord {
            inequality: ineq.name.clone(),
            geometry: t.kind(),
            link,
            link_label: ineq.links[link].label().to_string(),
            sides: t.sides(),
            lhs: e.lhs,
            rhs: e.rhs,
            gap: e.gap,
            normalized_gap: e.normalized_gap(),
            provenance,
        }
    }

    pub fn triangle(&self) -> Result<Triangle, InequalityError> {
        let [a, b, c] = self.sides;
        Triangle::new(self.geometry, a, b, c)
            .map_err(|e| InequalityError::InvalidArgument(format!("stored triangle: {e}")))
    }

    /// Re-evaluates the stored triangle; true iff it still violates the link
    /// and reproduces the stored gap.
    pub fn reverify(&self, reg: &Registry) -> Result<bool, InequalityError> {
        let ineq = reg.lookup(&self.inequality)?;
        let link = ineq
            .links
            .get(self.link)
            .ok_or_else(|| InequalityError::InvalidArgument(format!("no link {}", self.link)))?;
        let (lhs, rhs) = link.lhs_rhs(&self.triangle()?);
        let e = InequalityEvaluation::new(lhs, rhs);
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        Ok(!e.holds && (e.gap - self.gap).abs() <= REVERIFY_TOLERANCE * scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub inequality: String,
    pub geometry: Geometry,
    pub budget: usize,
    pub evaluations: usize,
    /// Smallest normalized gap over all links and all evaluated triangles.
    pub best_normalized_gap: f64,
    pub record: Option<CounterexampleRecord>,
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        self.record.is_some()
    }
}

/// Worst link of `t`: `(link, evaluation)` with the smallest normalized gap.
fn worst_link(ineq: &Inequality, t: &Triangle) -> Option<(usize, InequalityEvaluation)> {
    ineq.evaluate(t)
        .into_iter()
        .enumerate()
        .filter(|(_, e)| e.is_finite())
        .min_by(|x, y| x.1.normalized_gap().total_cmp(&y.1.normalized_gap()))
}

struct Candidate {
    triangle: Triangle,
    stream_index: u64,
    score: f64,
}

/// Looks for a triangle violating some link of `name` in `kind`, whether or
/// not the inequality is claimed there. Half the budget goes to random
/// samples, the rest to coordinate descent from the best of them.
pub fn search_counterexample(
    reg: &Registry,
    name: &str,
    kind: Geometry,
    budget: usize,
    cfg: &SamplerConfig,
) -> Result<SearchOutcome, InequalityError> {
    let ineq = reg.lookup(name)?;
    if budget == 0 {
        return Err(InequalityError::InvalidArgument("budget must be positive".into()));
    }
    let mut outcome = SearchOutcome {
        inequality: name.to_string(),
        geometry: kind,
        budget,
        evaluations: 0,
        best_normalized_gap: f64::INFINITY,
        record: None,
    };

    let random_budget = budget.div_ceil(2);
    let mut best: Vec<Candidate> = Vec::with_capacity(REFINE_STARTS + 1);
    for i in 0..random_budget as u64 {
        let t = sample_triangle(kind, cfg, i)
            .map_err(|source| InequalityError::Sampling { stream_index: i, source })?
            .sides;
        outcome.evaluations += 1;
        let Some((link, e)) = worst_link(ineq, &t) else { continue };
        let score = e.normalized_gap();
        outcome.best_normalized_gap = outcome.best_normalized_gap.min(score);
        if !e.holds {
            let prov = Provenance { seed: Some(cfg.seed), stream_index: Some(i), refinement_steps: 0 };
            let record = CounterexampleRecord::new(ineq, link, &t, e, prov);
            if record.reverify(reg)? {
                outcome.record = Some(record);
                return Ok(outcome);
            }
        }
        best.push(Candidate { triangle: t, stream_index: i, score });
        best.sort_by(|x, y| x.score.total_cmp(&y.score));
        best.truncate(REFINE_STARTS);
    }

    let refine_budget = budget - outcome.evaluations;
    let per_start = refine_budget / best.len().max(1);
    for cand in &best {
        if let Some(record) = refine(reg, ineq, cand, per_start, cfg.seed, &mut outcome)? {
            outcome.record = Some(record);
            return Ok(outcome);
        }
    }
    Ok(outcome)
}

fn refine(
    reg: &Registry,
    ineq: &Inequality,
    start: &Candidate,
    budget: usize,
    seed: u64,
    outcome: &mut SearchOutcome,
) -> Result<Option<CounterexampleRecord>, InequalityError> {
    let kind = start.triangle.kind();
    let mut sides = start.triangle.sides();
    let mut score = start.score;
    let mut step = start.triangle.perimeter() / 30.0;
    let mut used = 0;
    let mut steps = 0u32;
    while used < budget && step > 1e-12 * start.triangle.perimeter() {
        let mut improved = false;
        'coords: for k in 0..3 {
            for dir in [-1.0, 1.0] {
                if used >= budget {
                    break 'coords;
                }
                let mut trial = sides;
                trial[k] += dir * step;
                let Ok(t) = Triangle::new(kind, trial[0], trial[1], trial[2]) else { continue };
                used += 1;
                outcome.evaluations += 1;
                let Some((link, e)) = worst_link(ineq, &t) else { continue };
                let s = e.normalized_gap();
                outcome.best_normalized_gap = outcome.best_normalized_gap.min(s);
                if s < score {
                    sides = trial;
                    score = s;
                    steps += 1;
                    improved = true;
                    if !e.holds {
                        let prov = Provenance {
                            seed: Some(seed),
                            stream_index: Some(start.stream_index),
                            refinement_steps: steps,
                        };
                        let record = CounterexampleRecord::new(ineq, link, &t, e, prov);
                        if record.reverify(reg)? {
                            return Ok(Some(record));
                        }
                    }
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(None)
}

/// Evaluates a fixed list of triangles and returns the first violation.
pub fn scan_triangles(
    ineq: &Inequality,
    triangles: &[Triangle],
    floor: f64,
) -> Option<CounterexampleRecord> {
    for (i, t) in triangles.iter().enumerate() {
        for (k, e) in ineq.evaluate_with_floor(t, floor).into_iter().enumerate() {
            if !e.holds {
                let prov = Provenance { seed: None, stream_index: Some(i as u64), refinement_steps: 0 };
                return Some(CounterexampleRecord::new(ineq, k, t, e, prov));
            }
        }
    }
    None
}

/// [`scan_triangles`] with the default floor.
pub fn scan_default(ineq: &Inequality, triangles: &[Triangle]) -> Option<CounterexampleRecord> {
    scan_triangles(ineq, triangles, HOLDS_FLOOR)
}
