//! Versioned JSON report shared by the verification, search and simplex
//! suites.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::geometry::Geometry;
use crate::inequality::{
    search_counterexample, verify_inequality, CounterexampleRecord, InequalityError, Registry, SearchOutcome,
    VerificationResult, VerifyOptions,
};
use crate::sampling::SamplerConfig;
use crate::simplex::{verify_simplex_euler, SimplexError, SimplexResult};

pub const SCHEMA_VERSION: u32 = 1;
/// Pseudo-inequality name selecting the simplex suite.
pub const SIMPLEX_SUITE: &str = "simplex-euler";
pub const SIMPLEX_DIMENSIONS: [usize; 4] = [2, 3, 4, 5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub geometry: Option<Geometry>,
    pub inequalities: Vec<String>,
    pub seed: u64,
    pub samples: usize,
    pub dimension: Option<usize>,
    pub budget: Option<usize>,
    pub tolerance: f64,
    pub expect_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    #[serde(flatten)]
    pub result: VerificationResult,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ConfigEcho,
    pub results: Vec<ResultEntry>,
    pub simplex_results: Vec<SimplexResult>,
    pub searches: Vec<SearchOutcome>,
    pub counterexamples: Vec<CounterexampleRecord>,
    pub overall_pass: bool,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn new(config: ConfigEcho) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            results: Vec::new(),
            simplex_results: Vec::new(),
            searches: Vec::new(),
            counterexamples: Vec::new(),
            overall_pass: true,
            wall_time_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per inequality link and one per simplex run.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "suite",
            "geometry",
            "link",
            "samples",
            "violations",
            "min_gap",
            "min_normalized_gap",
            "equality_probe_max_gap",
            "strict_probe_min_gap",
        ])
        .expect("in-memory csv");
        for e in &self.results {
            let r = &e.result;
            for l in &r.links {
                w.serialize((
                    &r.inequality,
                    r.geometry.name(),
                    &l.label,
                    r.samples,
                    l.violations,
                    l.min_gap,
                    l.min_normalized_gap,
                    l.equality_probe_max_gap,
                    l.strict_probe_min_gap,
                ))
                .expect("in-memory csv");
            }
        }
        for s in &self.simplex_results {
            w.serialize((
                format!("{SIMPLEX_SUITE}-{}", s.dimension),
                s.geometry.name(),
                "euler",
                s.samples,
                s.violations + s.projection_violations,
                s.min_normalized_gap,
                s.min_normalized_gap,
                s.equality_gap.abs(),
                f64::NAN,
            ))
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}

/// Removes every `wall_time_ms` field, leaving the deterministic part.
pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_time_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Inequality(#[from] InequalityError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// One verification job.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Inequality { name: String, geometry: Geometry },
    Simplex { geometry: Geometry, dimension: usize },
}

/// Resolves a selection to jobs, rejecting geometries where a named
/// inequality is not claimed.
pub fn plan(
    reg: &Registry,
    names: &[String],
    geometry: Option<Geometry>,
    dimension: Option<usize>,
) -> Result<Vec<Job>, InequalityError> {
    let mut jobs = Vec::new();
    for name in names {
        if name == SIMPLEX_SUITE {
            let geometries = match geometry {
                Some(Geometry::Hyperbolic) => {
                    return Err(InequalityError::NotApplicable { name: name.clone(), geometry: Geometry::Hyperbolic })
                }
                Some(g) => vec![g],
                None => vec![Geometry::Euclidean, Geometry::Spherical],
            };
            let dims = dimension.map(|d| vec![d]).unwrap_or(SIMPLEX_DIMENSIONS.to_vec());
            for g in geometries {
                for &d in &dims {
                    jobs.push(Job::Simplex { geometry: g, dimension: d });
                }
            }
            continue;
        }
        let ineq = reg.lookup(name)?;
        match geometry {
            Some(g) if !ineq.holds_in(g) => {
                return Err(InequalityError::NotApplicable { name: name.clone(), geometry: g })
            }
            Some(g) => jobs.push(Job::Inequality { name: name.clone(), geometry: g }),
            None => jobs.extend(
                ineq.claims.iter().map(|c| Job::Inequality { name: name.clone(), geometry: c.geometry }),
            ),
        }
    }
    Ok(jobs)
}

/// Every registered inequality followed by the simplex suite.
pub fn all_names(reg: &Registry) -> Vec<String> {
    let mut names: Vec<String> = reg.names().into_iter().map(String::from).collect();
    names.push(SIMPLEX_SUITE.to_string());
    names
}

/// Runs `jobs` in order and assembles the report.
pub fn run_verify(
    reg: &Registry,
    jobs: &[Job],
    config: ConfigEcho,
) -> Result<Report, SuiteError> {
    let start = Instant::now();
    let opts = VerifyOptions { floor: config.tolerance, adversarial: true };
    let mut report = Report::new(config);
    for job in jobs {
        match job {
            Job::Inequality { name, geometry } => {
                let t0 = Instant::now();
                let cfg = SamplerConfig::for_geometry(*geometry, report.config.seed, report.config.samples);
                let result = verify_inequality(reg, name, *geometry, &cfg, &opts)?;
                report.overall_pass &= result.passed;
                if let Some(c) = &result.first_violation {
                    report.counterexamples.push(c.clone());
                }
                report.results.push(ResultEntry { result, wall_time_ms: t0.elapsed().as_millis() as u64 });
            }
            Job::Simplex { geometry, dimension } => {
                let r = verify_simplex_euler(*geometry, *dimension, report.config.samples, report.config.seed)?;
                report.overall_pass &= r.passed;
                report.simplex_results.push(r);
            }
        }
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Runs one counterexample search. `overall_pass` is true iff the outcome
/// matches `config.expect_violation`.
pub fn run_search(
    reg: &Registry,
    name: &str,
    geometry: Geometry,
    budget: usize,
    config: ConfigEcho,
) -> Result<Report, SuiteError> {
    let start = Instant::now();
    let cfg = SamplerConfig::for_geometry(geometry, config.seed, 1);
    let outcome = search_counterexample(reg, name, geometry, budget, &cfg)?;
    let mut report = Report::new(config);
    report.overall_pass = outcome.found() == report.config.expect_violation;
    if let Some(c) = &outcome.record {
        report.counterexamples.push(c.clone());
    }
    report.searches.push(outcome);
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo(samples: usize) -> ConfigEcho {
        ConfigEcho {
            command: "verify".into(),
            geometry: None,
            inequalities: vec![],
            seed: 42,
            samples,
            dimension: None,
            budget: None,
            tolerance: crate::inequality::HOLDS_FLOOR,
            expect_violation: false,
        }
    }

    #[test]
    fn plan_expands_claims() {
        let reg = Registry::builtin();
        let jobs = plan(reg, &["euler".into()], None, None).unwrap();
        assert_eq!(jobs.len(), 3);
        assert!(plan(reg, &["eq7-left".into()], Some(Geometry::Hyperbolic), None).is_err());
        let jobs = plan(reg, &[SIMPLEX_SUITE.into()], None, Some(4)).unwrap();
        assert_eq!(jobs.len(), 2);
        assert!(plan(reg, &["nope".into()], None, None).is_err());
    }

    #[test]
    fn report_round_trips_and_strips_timing() {
        let reg = Registry::builtin();
        let jobs = plan(reg, &["euler".into(), SIMPLEX_SUITE.into()], None, Some(3)).unwrap();
        let report = run_verify(reg, &jobs, echo(200)).unwrap();
        assert!(report.overall_pass);
        let json = report.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back.results.len(), 3);
        let mut v: Value = serde_json::from_str(&json).unwrap();
        strip_timing(&mut v);
        assert!(!v.to_string().contains("wall_time_ms"));
        assert_eq!(v["schema_version"], 1);
        assert!(report.to_csv().starts_with("suite,geometry,link,"));
    }

    #[test]
    fn search_report_expectation() {
        let reg = Registry::builtin();
        let mut cfg = echo(1);
        cfg.expect_violation = true;
        let r = run_search(reg, "euler", Geometry::Spherical, 2000, cfg).unwrap();
        assert!(!r.overall_pass);
        assert!(r.counterexamples.is_empty());
    }
}
