//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 violation or unmet expectation, 2 usage or
//! validation error. Reports are written only after every flag has been
//! validated.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::geometry::{
    circumradius_functional, inradius_functional, j_invariants, radius_from_functional, Geometry, GeometryError,
    Triangle,
};
use crate::inequality::{InequalityError, Registry, HOLDS_FLOOR};
use crate::report::{all_names, plan, run_search, run_verify, ConfigEcho, Report, SuiteError, SIMPLEX_SUITE};
use crate::sampling::{sample_triangle, SamplerConfig};
use crate::simplex::{
    euclidean_circumradius, euclidean_inradius, sample_euclidean_simplex, sample_spherical_simplex,
    spherical_circumradius, spherical_inradius,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "CURVTRI_THREADS";

#[derive(Debug, Parser)]
#[command(name = "curvtri", version, about = "Euler-type inequalities on constant-curvature surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radii and invariants of one triangle given by its sides.
    Compute(ComputeArgs),
    /// Random triangles (or simplices with --dimension).
    Sample(SampleArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Search for a counterexample.
    Search(SearchArgs),
    /// Run the n-simplex Euler suite.
    Simplex(SimplexArgs),
    /// Gap along the family a = 1, b = 1, c = lambda for lambda in (0, 2).
    Plotdata(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long, default_value = "euclidean")]
    pub geometry: Geometry,
    #[arg(allow_negative_numbers = true)]
    pub a: f64,
    #[arg(allow_negative_numbers = true)]
    pub b: f64,
    #[arg(allow_negative_numbers = true)]
    pub c: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value = "euclidean")]
    pub geometry: Geometry,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sample n-simplices instead of triangles.
    #[arg(long)]
    pub dimension: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict to one geometry; by default every claimed geometry runs.
    #[arg(long)]
    pub geometry: Option<Geometry>,
    /// Inequality name, or `simplex-euler`. Repeatable.
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pub inequality: Vec<String>,
    /// Every registered inequality plus the simplex suite.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Simplex dimension; only used by the simplex suite.
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Relative floor below which a negative gap counts as a violation.
    #[arg(long, default_value_t = HOLDS_FLOOR)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub inequality: String,
    #[arg(long)]
    pub geometry: Geometry,
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Succeed only if a counterexample is found.
    #[arg(long)]
    pub expect_violation: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimplexArgs {
    /// Euclidean or spherical; both by default.
    #[arg(long)]
    pub geometry: Option<Geometry>,
    /// Dimension; 2 through 5 by default.
    #[arg(long)]
    pub dimension: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, default_value = "euler")]
    pub inequality: String,
    #[arg(long, default_value = "euclidean")]
    pub geometry: Geometry,
    /// Number of lambda values, evenly spaced in (0, 2).
    #[arg(long, default_value_t = 199)]
    pub samples: usize,
    /// Index of the link to plot for chains.
    #[arg(long, default_value_t = 0)]
    pub link: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError {
    pub code: String,
    pub message: String,
}

impl From<GeometryError> for UsageError {
    fn from(e: GeometryError) -> Self {
        UsageError { code: e.code().to_string(), message: e.to_string() }
    }
}

impl From<InequalityError> for UsageError {
    fn from(e: InequalityError) -> Self {
        let code = match &e {
            InequalityError::UnknownInequality(_) => "UnknownInequality",
            InequalityError::NotApplicable { .. } => "NotApplicable",
            InequalityError::InvalidArgument(_) => "InvalidArgument",
            _ => "InequalityError",
        };
        UsageError { code: code.into(), message: e.to_string() }
    }
}

impl From<SuiteError> for UsageError {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Inequality(e) => e.into(),
            SuiteError::Simplex(e) => UsageError { code: "SimplexError".into(), message: e.to_string() },
        }
    }
}

fn usage(code: &str, message: impl Into<String>) -> UsageError {
    UsageError { code: code.into(), message: message.into() }
}

/// Configures the global worker pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<(), UsageError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage("InvalidArgument", format!("{THREADS_ENV}={raw} is not a positive integer")))?;
    // A pool built earlier in the same process is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(text: &str, out_path: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), UsageError> {
    match out_path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage("Io", format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| usage("Io", e.to_string())),
    }
}

fn to_csv<T: Serialize>(header: &[&str], rows: &[T]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn render_report(report: &Report, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), UsageError> {
    let text = match output.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    };
    emit(&text, &output.out, stdout)
}

fn report_exit(report: &Report) -> i32 {
    if report.overall_pass {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

fn cmd_compute(args: &ComputeArgs, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    let t = Triangle::new(args.geometry, args.a, args.b, args.c)?;
    let kind = t.kind();
    let rho_big = circumradius_functional(&t);
    let rho_small = inradius_functional(&t);
    let j = j_invariants(&t);
    let s = t.shadow_sides();
    let big = rho_big.radius()?;
    let small = radius_from_functional(kind, rho_small.value)?;
    let text = match args.output.format {
        Format::Json => {
            let v = json!({
                "geometry": kind,
                "sides": t.sides(),
                "s_a": s[0],
                "s_b": s[1],
                "s_c": s[2],
                "rho_R": rho_big.value,
                "rho_r": rho_small.value,
                "R": big,
                "r": small,
                "J": j.j,
                "J_bar": j.jbar,
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => to_csv(
            &["geometry", "a", "b", "c", "s_a", "s_b", "s_c", "rho_R", "rho_r", "R", "r", "J", "J_bar"],
            &[(
                kind.name(),
                t.a(),
                t.b(),
                t.c(),
                s[0],
                s[1],
                s[2],
                rho_big.value,
                rho_small.value,
                big,
                small,
                j.j,
                j.jbar,
            )],
        ),
    };
    emit(&text, &args.output.out, stdout)?;
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct TriangleRow {
    stream_index: u64,
    a: f64,
    b: f64,
    c: f64,
    #[serde(rename = "rho_R")]
    rho_r_big: f64,
    #[serde(rename = "rho_r")]
    rho_r_small: f64,
}

#[derive(Serialize)]
struct SimplexRow {
    stream_index: u64,
    dimension: usize,
    #[serde(rename = "rho_R")]
    rho_r_big: f64,
    #[serde(rename = "rho_r")]
    rho_r_small: f64,
}

fn cmd_sample(args: &SampleArgs, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    if args.samples == 0 {
        return Err(usage("InvalidArgument", "--samples must be at least 1"));
    }
    let text = if let Some(n) = args.dimension {
        if n < 2 {
            return Err(usage("InvalidArgument", format!("--dimension {n} is below 2")));
        }
        let rows = (0..args.samples as u64)
            .map(|i| {
                let (big, small) = match args.geometry {
                    Geometry::Euclidean => {
                        let s = sample_euclidean_simplex(n, args.seed, i)?;
                        (euclidean_circumradius(&s)?.1, euclidean_inradius(&s)?.1)
                    }
                    Geometry::Spherical => {
                        let s = sample_spherical_simplex(n, args.seed, i)?;
                        (spherical_circumradius(&s)?.1.tan(), spherical_inradius(&s)?.1.tan())
                    }
                    Geometry::Hyperbolic => {
                        return Err(crate::simplex::SimplexError::InvalidInput(
                            "hyperbolic simplices are not supported".into(),
                        ))
                    }
                };
                Ok(SimplexRow { stream_index: i, dimension: n, rho_r_big: big, rho_r_small: small })
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| usage("SimplexError", e.to_string()))?;
        match args.output.format {
            Format::Json => serde_json::to_string_pretty(&rows).expect("json") + "\n",
            Format::Csv => to_csv(&["stream_index", "dimension", "rho_R", "rho_r"], &rows),
        }
    } else {
        let cfg = SamplerConfig::for_geometry(args.geometry, args.seed, args.samples);
        let rows = (0..args.samples as u64)
            .map(|i| {
                let t = sample_triangle(args.geometry, &cfg, i)?.sides;
                Ok(TriangleRow {
                    stream_index: i,
                    a: t.a(),
                    b: t.b(),
                    c: t.c(),
                    rho_r_big: circumradius_functional(&t).value,
                    rho_r_small: inradius_functional(&t).value,
                })
            })
            .collect::<Result<Vec<_>, crate::oracle::OracleError>>()
            .map_err(|e| usage("SamplingError", e.to_string()))?;
        match args.output.format {
            Format::Json => serde_json::to_string_pretty(&rows).expect("json") + "\n",
            Format::Csv => to_csv(&["stream_index", "a", "b", "c", "rho_R", "rho_r"], &rows),
        }
    };
    emit(&text, &args.output.out, stdout)?;
    Ok(EXIT_PASS)
}

fn check_tolerance(t: f64) -> Result<(), UsageError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(usage("InvalidArgument", format!("--tolerance {t} must be finite and non-negative")));
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    let reg = Registry::builtin();
    if args.samples == 0 {
        return Err(usage("InvalidArgument", "--samples must be at least 1"));
    }
    check_tolerance(args.tolerance)?;
    let names = if args.all { all_names(reg) } else { args.inequality.clone() };
    if args.dimension.is_some() && !names.iter().any(|n| n == SIMPLEX_SUITE) {
        return Err(usage("InvalidArgument", "--dimension applies only to the simplex suite"));
    }
    if let Some(n) = args.dimension.filter(|&n| n < 2) {
        return Err(usage("InvalidArgument", format!("--dimension {n} is below 2")));
    }
    let jobs = if args.all {
        // Restricting --all to a geometry drops entries not claimed there.
        let mut jobs = Vec::new();
        for name in &names {
            match plan(reg, std::slice::from_ref(name), args.geometry, args.dimension) {
                Ok(j) => jobs.extend(j),
                Err(InequalityError::NotApplicable { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
        jobs
    } else {
        plan(reg, &names, args.geometry, args.dimension)?
    };
    let config = ConfigEcho {
        command: "verify".into(),
        geometry: args.geometry,
        inequalities: names,
        seed: args.seed,
        samples: args.samples,
        dimension: args.dimension,
        budget: None,
        tolerance: args.tolerance,
        expect_violation: false,
    };
    let report = run_verify(reg, &jobs, config)?;
    render_report(&report, &args.output, stdout)?;
    Ok(report_exit(&report))
}

fn cmd_search(args: &SearchArgs, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    let reg = Registry::builtin();
    reg.lookup(&args.inequality)?;
    if args.budget == 0 {
        return Err(usage("InvalidArgument", "--budget must be at least 1"));
    }
    let config = ConfigEcho {
        command: "search".into(),
        geometry: Some(args.geometry),
        inequalities: vec![args.inequality.clone()],
        seed: args.seed,
        samples: 0,
        dimension: None,
        budget: Some(args.budget),
        tolerance: HOLDS_FLOOR,
        expect_violation: args.expect_violation,
    };
    let report = run_search(reg, &args.inequality, args.geometry, args.budget, config)?;
    render_report(&report, &args.output, stdout)?;
    Ok(report_exit(&report))
}

fn cmd_simplex(args: &SimplexArgs, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    let reg = Registry::builtin();
    if args.samples == 0 {
        return Err(usage("InvalidArgument", "--samples must be at least 1"));
    }
    if let Some(n) = args.dimension.filter(|&n| n < 2) {
        return Err(usage("InvalidArgument", format!("--dimension {n} is below 2")));
    }
    let names = vec![SIMPLEX_SUITE.to_string()];
    let jobs = plan(reg, &names, args.geometry, args.dimension)?;
    let config = ConfigEcho {
        command: "simplex".into(),
        geometry: args.geometry,
        inequalities: names,
        seed: args.seed,
        samples: args.samples,
        dimension: args.dimension,
        budget: None,
        tolerance: HOLDS_FLOOR,
        expect_violation: false,
    };
    let report = run_verify(reg, &jobs, config)?;
    render_report(&report, &args.output, stdout)?;
    Ok(report_exit(&report))
}

fn cmd_plotdata(args: &PlotArgs, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    let ineq = Registry::builtin().lookup(&args.inequality)?;
    if args.link >= ineq.links.len() {
        return Err(usage("InvalidArgument", format!("'{}' has {} links", ineq.name, ineq.links.len())));
    }
    if args.samples == 0 {
        return Err(usage("InvalidArgument", "--samples must be at least 1"));
    }
    let link = &ineq.links[args.link];
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["lambda", "lhs", "rhs", "gap"]).expect("in-memory csv");
    let mut omitted = 0usize;
    let denom = (args.samples + 1) as f64;
    for k in 1..=args.samples {
        let lambda = (2 * k) as f64 / denom;
        match Triangle::new(args.geometry, 1.0, 1.0, lambda) {
            Ok(t) => {
                let (lhs, rhs) = link.lhs_rhs(&t);
                w.serialize((lambda, lhs, rhs, lhs - rhs)).expect("in-memory csv");
            }
            Err(_) => omitted += 1,
        }
    }
    let mut text = String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8");
    if omitted > 0 {
        text.push_str(&format!("# {omitted} rows omitted: outside the {} domain\n", args.geometry));
    }
    emit(&text, &args.out, stdout)?;
    Ok(EXIT_PASS)
}

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, UsageError> {
    match &cli.command {
        Command::Compute(a) => cmd_compute(a, stdout),
        Command::Sample(a) => cmd_sample(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Search(a) => cmd_search(a, stdout),
        Command::Simplex(a) => cmd_simplex(a, stdout),
        Command::Plotdata(a) => cmd_plotdata(a, stdout),
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match init_threads().and_then(|_| dispatch(&cli, stdout)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {}", e.code, e.message);
            EXIT_USAGE
        }
    }
}
