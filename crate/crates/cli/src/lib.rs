//! Command-line front end for the rectifiability toolkit.

pub mod suite;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use rectifiability::curvature::{
    curvature_exact, curvature_mc, kappa_comparison, m_p_functional, DEFAULT_BUDGET,
};
use rectifiability::measure::dyadic_cubes_touching;
use rectifiability::{
    beta_ball, load_csv, scale_profile, synthesize, verify_corollary_lw11, verify_lemma1,
    verify_lemma2, verify_pointwise_bounds, BetaParams, CurvatureParams, DyadicCube, Generator,
    MultiscaleParams, PointCloudMeasure, VerificationReport,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "rectify",
    version,
    about = "Beta numbers, discrete curvature and multiscale inequality checks"
)]
pub struct Cli {
    /// Seed for generated inputs and randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteSize {
    Smoke,
    Full,
}

#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// CSV file with header x0,...,x{n-1}[,w].
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generator spec such as `triangle`, `segment:samples=20` or `cloud:count=10,dim=3`.
    #[arg(long = "gen")]
    pub generator: Option<String>,
}

fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| format!("{c:?} is not a number"))
        })
        .collect()
}

fn parse_corner(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| format!("{c:?} is not an integer"))
        })
        .collect()
}

fn serialize_extended<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BetaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: ::std::vec::Vec<f64>,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Restrict to planes through the centre.
    #[arg(long)]
    pub centred: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: ::std::vec::Vec<f64>,
    #[arg(long, default_value_t = f64::INFINITY)]
    #[serde(serialize_with = "serialize_extended")]
    pub rho: f64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub centred: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurvatureArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: ::std::vec::Vec<f64>,
    #[arg(long = "R", alias = "radius", default_value_t = f64::INFINITY)]
    #[serde(rename = "R", serialize_with = "serialize_extended")]
    pub radius: f64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Largest number of tuples exact enumeration may visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MpArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub p: f64,
    /// Also compare against the integrated curvature with α = 1 - m(m+1)/p.
    #[arg(long)]
    pub compare: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Lemma1Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// Evaluation point; every atom when omitted.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: Option<::std::vec::Vec<f64>>,
    #[arg(long = "R", alias = "radius", default_value_t = f64::INFINITY)]
    #[serde(rename = "R", serialize_with = "serialize_extended")]
    pub radius: f64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Lemma2Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub level: i32,
    /// Integer corner of the cube; every cube of the level meeting the support when omitted.
    #[arg(long, value_parser = parse_corner, allow_hyphen_values = true)]
    pub corner: Option<::std::vec::Vec<i64>>,
    #[arg(long, default_value_t = 1.0)]
    #[serde(serialize_with = "serialize_extended")]
    pub rho: f64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Defaults to p.
    #[arg(long)]
    pub q: Option<f64>,
    /// Density exponent; defaults to m.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorollaryArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub level: i32,
    #[arg(long, value_parser = parse_corner, allow_hyphen_values = true)]
    pub corner: Option<::std::vec::Vec<i64>>,
    #[arg(long = "R", alias = "radius", default_value_t = 1.0)]
    #[serde(rename = "R", serialize_with = "serialize_extended")]
    pub radius: f64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    /// Trials per bound.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SuiteArgs {
    #[arg(long, value_enum, default_value_t = SuiteSize::Smoke)]
    pub size: SuiteSize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Summary of a measure.
    Info(Source),
    /// Beta number of a ball.
    Beta(BetaArgs),
    /// Piecewise scale profile around a point.
    Profile(ProfileArgs),
    /// Discrete curvature K at a point.
    Curvature(CurvatureArgs),
    /// The M_p functional of the whole measure.
    Mp(MpArgs),
    #[command(name = "verify-lemma1")]
    VerifyLemma1(Lemma1Args),
    #[command(name = "verify-lemma2")]
    VerifyLemma2(Lemma2Args),
    #[command(name = "verify-corollary")]
    VerifyCorollary(CorollaryArgs),
    #[command(name = "verify-bounds")]
    VerifyBounds(BoundsArgs),
    /// Seeded battery of every inequality check.
    Suite(SuiteArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Info(_) => "info",
            Command::Beta(_) => "beta",
            Command::Profile(_) => "profile",
            Command::Curvature(_) => "curvature",
            Command::Mp(_) => "mp",
            Command::VerifyLemma1(_) => "verify-lemma1",
            Command::VerifyLemma2(_) => "verify-lemma2",
            Command::VerifyCorollary(_) => "verify-corollary",
            Command::VerifyBounds(_) => "verify-bounds",
            Command::Suite(_) => "suite",
        }
    }

    fn params(&self) -> Result<Value, CliError> {
        let v = match self {
            Command::Info(a) => serde_json::to_value(a),
            Command::Beta(a) => serde_json::to_value(a),
            Command::Profile(a) => serde_json::to_value(a),
            Command::Curvature(a) => serde_json::to_value(a),
            Command::Mp(a) => serde_json::to_value(a),
            Command::VerifyLemma1(a) => serde_json::to_value(a),
            Command::VerifyLemma2(a) => serde_json::to_value(a),
            Command::VerifyCorollary(a) => serde_json::to_value(a),
            Command::VerifyBounds(a) => serde_json::to_value(a),
            Command::Suite(a) => serde_json::to_value(a),
        };
        v.map_err(|e| CliError::new("io_error", e.to_string()))
    }
}

/// A failure that maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "code": self.code, "message": self.message } }).to_string()
    }
}

impl From<rectifiability::Error> for CliError {
    fn from(e: rectifiability::Error) -> Self {
        Self::new(e.code(), e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

/// The rendered artifact of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    /// Some assertive verification failed.
    pub failed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed)
    }
}

#[derive(Serialize)]
struct Document<'a> {
    command: &'a str,
    params: Value,
    results: Value,
    version: &'a str,
    seed: u64,
}

fn load_measure(source: &Source, seed: u64) -> Result<PointCloudMeasure, CliError> {
    match (&source.input, &source.generator) {
        (Some(path), None) => {
            let file = fs::File::open(path)
                .map_err(|e| CliError::new("io_error", format!("{}: {e}", path.display())))?;
            Ok(load_csv(std::io::BufReader::new(file))?)
        }
        (None, Some(spec)) => Ok(synthesize(&spec.parse::<Generator>()?, seed)?),
        _ => Err(CliError::new(
            "invalid_parameter",
            "exactly one of --input and --gen is required",
        )),
    }
}

fn check_radius(name: &str, value: f64, allow_inf: bool) -> Result<(), CliError> {
    let ok = value > 0.0 && (value.is_finite() || (allow_inf && value.is_infinite()));
    if ok {
        Ok(())
    } else {
        Err(CliError::new(
            "invalid_parameter",
            format!("{name} = {value} must be positive"),
        ))
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::new("io_error", e.to_string()))
}

fn reports_value(reports: &[VerificationReport]) -> Result<(Value, bool), CliError> {
    let failed = reports.iter().any(|r| r.exact && !r.pass);
    Ok((to_value(&reports)?, failed))
}

fn cubes_for(
    mu: &PointCloudMeasure,
    level: i32,
    corner: &Option<Vec<i64>>,
) -> Result<Vec<DyadicCube>, CliError> {
    match corner {
        Some(c) if c.len() != mu.dim() => Err(CliError::new(
            "dimension_mismatch",
            format!(
                "corner has {} coordinates, the measure lives in R^{}",
                c.len(),
                mu.dim()
            ),
        )),
        Some(c) => Ok(vec![DyadicCube::new(level, c.clone())]),
        None => Ok(dyadic_cubes_touching(mu, level)),
    }
}

fn profile_csv(mu: &PointCloudMeasure, a: &ProfileArgs) -> Result<String, CliError> {
    let profile = scale_profile(mu, &a.center, a.rho, &BetaParams::new(a.m, a.p, a.centred))?;
    let mut out = String::from("r_lo,r_hi,mass,beta_numerator\n");
    for iv in &profile.intervals {
        out.push_str(&format!(
            "{},{},{},{}\n",
            iv.r_lo, iv.r_hi, iv.mass, iv.beta_numerator
        ));
    }
    Ok(out)
}

fn results(command: &Command, seed: u64) -> Result<(Value, bool), CliError> {
    match command {
        Command::Info(source) => {
            let mu = load_measure(source, seed)?;
            let n = mu.dim();
            let mut lower = vec![f64::INFINITY; n];
            let mut upper = vec![f64::NEG_INFINITY; n];
            for (y, _) in mu.atoms() {
                for k in 0..n {
                    lower[k] = lower[k].min(y[k]);
                    upper[k] = upper[k].max(y[k]);
                }
            }
            let positive = mu.weights().iter().filter(|&&w| w > 0.0).count();
            let bbox = if mu.is_empty() {
                Value::Null
            } else {
                json!({ "lower": lower, "upper": upper })
            };
            Ok((
                json!({
                    "dim": n,
                    "atoms": mu.len(),
                    "positive_atoms": positive,
                    "total_mass": mu.total_mass(),
                    "bounding_box": bbox,
                }),
                false,
            ))
        }
        Command::Beta(a) => {
            let mu = load_measure(&a.source, seed)?;
            let v = beta_ball(&mu, &a.center, a.r, &BetaParams::new(a.m, a.p, a.centred))?;
            Ok((to_value(&v)?, false))
        }
        Command::Profile(a) => {
            let mu = load_measure(&a.source, seed)?;
            check_radius("rho", a.rho, true)?;
            let profile =
                scale_profile(&mu, &a.center, a.rho, &BetaParams::new(a.m, a.p, a.centred))?;
            Ok((to_value(&profile.intervals)?, false))
        }
        Command::Curvature(a) => {
            let mu = load_measure(&a.source, seed)?;
            check_radius("R", a.radius, true)?;
            let params = CurvatureParams::new(a.m, a.p, a.alpha, a.radius);
            let estimate = match a.mode {
                Mode::Exact => curvature_exact(&mu, &a.center, &params, a.budget)?,
                Mode::Mc => curvature_mc(&mu, &a.center, &params, a.samples, seed)?,
            };
            Ok((to_value(&estimate)?, false))
        }
        Command::Mp(a) => {
            let mu = load_measure(&a.source, seed)?;
            if a.compare {
                Ok((
                    to_value(&kappa_comparison(&mu, a.p, a.m, a.budget)?)?,
                    false,
                ))
            } else {
                Ok((
                    json!({ "m_p": m_p_functional(&mu, a.p, a.m, a.budget)? }),
                    false,
                ))
            }
        }
        Command::VerifyLemma1(a) => {
            let mu = load_measure(&a.source, seed)?;
            check_radius("R", a.radius, true)?;
            let centers: Vec<Vec<f64>> = match &a.center {
                Some(c) => vec![c.clone()],
                None => mu
                    .atoms()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(y, _)| y.to_vec())
                    .collect(),
            };
            let reports = centers
                .iter()
                .map(|x| verify_lemma1(&mu, x, a.radius, a.m, a.p, a.alpha, a.budget))
                .collect::<rectifiability::Result<Vec<_>>>()?;
            reports_value(&reports)
        }
        Command::VerifyLemma2(a) => {
            let mu = load_measure(&a.source, seed)?;
            check_radius("rho", a.rho, true)?;
            let params = MultiscaleParams {
                m: a.m,
                n: mu.dim(),
                p: a.p,
                q: a.q.unwrap_or(a.p),
                gamma: a.gamma.unwrap_or(a.m as f64),
                alpha: a.alpha,
                rho: a.rho,
                centred: true,
            };
            params.validate()?;
            let reports = cubes_for(&mu, a.level, &a.corner)?
                .iter()
                .map(|q| verify_lemma2(&mu, q, &params))
                .collect::<rectifiability::Result<Vec<_>>>()?;
            reports_value(&reports)
        }
        Command::VerifyCorollary(a) => {
            let mu = load_measure(&a.source, seed)?;
            check_radius("R", a.radius, true)?;
            let reports = cubes_for(&mu, a.level, &a.corner)?
                .iter()
                .map(|q| verify_corollary_lw11(&mu, q, a.radius, a.m, a.p, a.alpha, a.budget))
                .collect::<rectifiability::Result<Vec<_>>>()?;
            reports_value(&reports)
        }
        Command::VerifyBounds(a) => reports_value(&[verify_pointwise_bounds(a.samples, seed)?]),
        Command::Suite(a) => {
            let summary = suite::run_suite(seed, a.size)?;
            let failed = summary.failed > 0;
            Ok((to_value(&summary)?, failed))
        }
    }
}

/// Runs one invocation and renders its report without touching the filesystem
/// beyond reading inputs.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.format == Format::Csv {
        let Command::Profile(a) = &cli.command else {
            return Err(CliError::new(
                "invalid_parameter",
                "csv output is only available for profile",
            ));
        };
        let mu = load_measure(&a.source, cli.seed)?;
        check_radius("rho", a.rho, true)?;
        return Ok(Outcome {
            body: profile_csv(&mu, a)?,
            failed: false,
        });
    }
    let (results, failed) = results(&cli.command, cli.seed)?;
    let doc = Document {
        command: cli.command.name(),
        params: cli.command.params()?,
        results,
        version: VERSION,
        seed: cli.seed,
    };
    let mut body =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::new("io_error", e.to_string()))?;
    body.push('\n');
    Ok(Outcome { body, failed })
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::new("io_error", format!("{}: {e}", path.display()));
    let name = path.file_name().ok_or_else(|| {
        CliError::new("io_error", format!("{} is not a file path", path.display()))
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(contents.as_bytes()).map_err(io)?;
    file.sync_all().map_err(io)?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// Full invocation: execute, emit, and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = execute(cli).and_then(|outcome| {
        match &cli.output {
            Some(path) => write_atomic(path, &outcome.body)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(outcome.body.as_bytes())
                    .map_err(|e| CliError::new("io_error", e.to_string()))?;
            }
        }
        Ok(outcome)
    });
    match outcome {
        Ok(o) => o.exit_code(),
        Err(e) => {
            eprintln!("{}", e.to_json());
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("rectify").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn exactly_one_source() {
        assert!(Cli::try_parse_from(["rectify", "info"]).is_err());
        assert!(
            Cli::try_parse_from(["rectify", "info", "--gen", "triangle", "--input", "a.csv"])
                .is_err()
        );
    }

    #[test]
    fn lemma1_on_triangle_passes() {
        let c = cli(&[
            "verify-lemma1",
            "--gen",
            "triangle",
            "--m",
            "1",
            "--p",
            "2",
            "--alpha",
            "0",
            "--R",
            "2",
        ]);
        let out = execute(&c).unwrap();
        assert_eq!(out.exit_code(), 0);
        let doc: Value = serde_json::from_str(&out.body).unwrap();
        assert_eq!(doc["command"], "verify-lemma1");
        assert_eq!(doc["version"], VERSION);
        assert_eq!(doc["params"]["R"], 2.0);
        assert!(doc["results"]
            .as_array()
            .unwrap()
            .iter()
            .all(|r| r["pass"] == true));
    }

    #[test]
    fn infinity_is_accepted_and_recorded() {
        let c = cli(&[
            "curvature",
            "--gen",
            "triangle",
            "--center",
            "0,0",
            "--R",
            "inf",
            "--m",
            "1",
        ]);
        let doc: Value = serde_json::from_str(&execute(&c).unwrap().body).unwrap();
        assert_eq!(doc["params"]["R"], "inf");
        assert!((doc["results"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn negative_corner_and_level_parse() {
        let c = cli(&[
            "verify-lemma2",
            "--gen",
            "triangle",
            "--level",
            "-1",
            "--corner",
            "-1,0",
            "--m",
            "1",
        ]);
        let Command::VerifyLemma2(a) = &c.command else {
            panic!()
        };
        assert_eq!((a.level, a.corner.clone()), (-1, Some(vec![-1, 0])));
        assert_eq!(execute(&c).unwrap().exit_code(), 0);
    }

    #[test]
    fn csv_only_for_profile() {
        let c = cli(&[
            "--format", "csv", "beta", "--gen", "triangle", "--center", "0,0", "--r", "1", "--m",
            "1",
        ]);
        assert_eq!(execute(&c).unwrap_err().code, "invalid_parameter");
        let c = cli(&[
            "--format",
            "csv",
            "profile",
            "--gen",
            "right_triangle",
            "--center",
            "0,0",
            "--m",
            "1",
            "--centred",
        ]);
        let body = execute(&c).unwrap().body;
        assert_eq!(body.lines().next(), Some("r_lo,r_hi,mass,beta_numerator"));
        assert_eq!(body.lines().count(), 3);
    }

    #[test]
    fn errors_carry_codes() {
        let c = cli(&[
            "beta", "--gen", "triangle", "--center", "0,0,0", "--r", "1", "--m", "1",
        ]);
        assert_eq!(execute(&c).unwrap_err().code, "dimension_mismatch");
        let c = cli(&[
            "beta",
            "--input",
            "/nonexistent.csv",
            "--center",
            "0,0",
            "--r",
            "1",
            "--m",
            "1",
        ]);
        assert_eq!(execute(&c).unwrap_err().code, "io_error");
        let c = cli(&[
            "curvature",
            "--gen",
            "cloud:count=30",
            "--center",
            "0,0",
            "--m",
            "1",
            "--budget",
            "10",
        ]);
        assert_eq!(execute(&c).unwrap_err().code, "budget_exceeded");
        let c = cli(&[
            "verify-lemma2",
            "--gen",
            "triangle",
            "--m",
            "1",
            "--p",
            "2",
            "--q",
            "3",
        ]);
        assert_eq!(execute(&c).unwrap_err().code, "invalid_parameter");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("rectify-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("report.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }
}
