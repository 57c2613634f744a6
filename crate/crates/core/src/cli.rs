//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 compute
//! error or property violation, 3 confirmed counterexample.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{boundary_csv, parse_matrix, to_json_string, MatrixJson};
use crate::matrix::ComplexMatrix;
use crate::power::{fractional_power_with, PowerMode, PowerResult, QuadratureOptions};
use crate::range::{classify, numerical_radius_with, range_boundary, RadiusOptions, RadiusReport, SectorReport};
use crate::verify::{
    hunt_counterexample, run_suite_with, EvalOptions, HuntClass, HuntConfig, InstanceSource, MatrixClass, Pid,
    SuiteConfig, DEFAULT_EIG_FLOOR, DEFAULT_SECTOR_TOL, DEFAULT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "numrange", version, about = "Numerical ranges, numerical radii and fractional matrix powers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a matrix and report its numerical radius.
    Analyze(AnalyzeArgs),
    /// Export support points of the numerical range boundary.
    Range(RangeArgs),
    /// Compute the principal power A^t, 0 < t <= 1.
    Power(PowerArgs),
    /// Run a seeded property suite.
    Verify(VerifyArgs),
    /// Search for instances violating w(A^t) >= w(A)^t.
    Hunt(HuntArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Hpd,
    Accretive,
    Dissipative,
    Ad,
    Sectorial,
    Generic,
}

impl From<ClassArg> for MatrixClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Hpd => MatrixClass::Hpd,
            ClassArg::Accretive => MatrixClass::Accretive,
            ClassArg::Dissipative => MatrixClass::Dissipative,
            ClassArg::Ad => MatrixClass::AccretiveDissipative,
            ClassArg::Sectorial => MatrixClass::Sectorial,
            ClassArg::Generic => MatrixClass::Generic,
        }
    }
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
    /// Angular grid for the numerical radius.
    #[arg(long, default_value_t = crate::range::DEFAULT_THETA_GRID)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct RangeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
    /// Number of boundary support points.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PowerArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
    #[arg(long)]
    pub t: f64,
    /// Quadrature target tolerance, relative to ||A||^t.
    #[arg(long, default_value_t = crate::power::DEFAULT_TARGET_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = ClassArg::Accretive)]
    pub class: ClassArg,
    /// Target sector angle for the sectorial class.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Property ids such as P3; repeatable. Defaults to all.
    #[arg(long = "pid")]
    pub pids: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Single exponent replacing the default grid 0.1, ..., 0.9.
    #[arg(long)]
    pub t: Option<f64>,
    /// Single integer power replacing the default set {2, 3, 4}.
    #[arg(long)]
    pub k: Option<u32>,
    /// Single root-power index m for P13 (2 <= m <= k).
    #[arg(long)]
    pub m: Option<u32>,
    /// Build instances as rotated k-th roots of sectorial matrices, so that A^k is accretive.
    #[arg(long)]
    pub root_instances: bool,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = crate::range::DEFAULT_THETA_GRID)]
    pub grid: usize,
    #[command(flatten)]
    pub output: Output,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct HuntArgs {
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0.5)]
    pub t_min: f64,
    #[arg(long, default_value_t = 0.95)]
    pub t_max: f64,
    /// Restrict the search to accretive-dissipative matrices with `ad`.
    #[arg(long, value_enum, default_value_t = ClassArg::Accretive)]
    pub class: ClassArg,
    #[arg(long, default_value_t = 0.1)]
    pub perturb_scale: f64,
    #[arg(long, default_value_t = crate::range::DEFAULT_THETA_GRID)]
    pub grid: usize,
    #[command(flatten)]
    pub output: Output,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn compute(err: Error) -> Self {
        let code = match err {
            Error::InvalidConfig(_) | Error::InvalidExponent { .. } => EXIT_USAGE,
            _ => EXIT_COMPUTE,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        Self::compute(err)
    }
}

#[derive(Serialize)]
struct Meta {
    wall_time_seconds: f64,
    version: &'static str,
}

impl Meta {
    fn since(start: Instant) -> Self {
        Self {
            wall_time_seconds: start.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    sector: SectorReport,
    radius: RadiusReport,
}

#[derive(Serialize)]
struct PowerOutput {
    #[serde(flatten)]
    matrix: MatrixJson,
    power: PowerResult,
}

#[derive(Serialize)]
struct WithMeta<T: Serialize> {
    #[serde(flatten)]
    report: T,
    meta: Meta,
}

#[derive(Serialize)]
struct BoundaryRow {
    theta: f64,
    re: f64,
    im: f64,
}

fn read_matrix(path: &Path) -> std::result::Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read input {}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| CliError::usage(format!("invalid matrix in {}: {e}", path.display())))
}

fn check_output(output: &Output) -> std::result::Result<(), CliError> {
    if let Some(path) = &output.out {
        let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(dir) = parent {
            if !dir.is_dir() {
                return Err(CliError::usage(format!("output directory {} does not exist", dir.display())));
            }
        }
        if path.is_dir() {
            return Err(CliError::usage(format!("output path {} is a directory", path.display())));
        }
    }
    Ok(())
}

fn emit(output: &Output, text: &str) -> std::result::Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError {
            code: EXIT_COMPUTE,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_json(format: Format, command: &str) -> std::result::Result<(), CliError> {
    if format == Format::Json {
        Ok(())
    } else {
        Err(CliError::usage(format!("{command} only writes json")))
    }
}

fn analyze(args: &AnalyzeArgs) -> std::result::Result<i32, CliError> {
    require_json(args.format, "analyze")?;
    check_output(&args.output)?;
    let a = read_matrix(&args.input)?;
    let radius = numerical_radius_with(
        &a,
        &RadiusOptions {
            grid: args.grid,
            ..RadiusOptions::default()
        },
    )?;
    let sector = classify(&a)?;
    emit(&args.output, &to_json_string(&AnalyzeOutput { sector, radius }))?;
    Ok(EXIT_OK)
}

fn range(args: &RangeArgs) -> std::result::Result<i32, CliError> {
    check_output(&args.output)?;
    let a = read_matrix(&args.input)?;
    let points = range_boundary(&a, args.grid)?;
    let text = match args.format {
        Format::Csv => boundary_csv(&points),
        Format::Json => to_json_string(
            &points
                .iter()
                .map(|p| BoundaryRow {
                    theta: p.theta,
                    re: p.z.re,
                    im: p.z.im,
                })
                .collect::<Vec<_>>(),
        ),
    };
    emit(&args.output, &text)?;
    Ok(EXIT_OK)
}

fn power(args: &PowerArgs) -> std::result::Result<i32, CliError> {
    require_json(args.format, "power")?;
    check_output(&args.output)?;
    let a = read_matrix(&args.input)?;
    let result = fractional_power_with(&a, args.t, PowerMode::Both, &QuadratureOptions::with_target(args.tol))?;
    let out = PowerOutput {
        matrix: MatrixJson::from_matrix(&result.value),
        power: result,
    };
    emit(&args.output, &to_json_string(&out))?;
    Ok(EXIT_OK)
}

fn verify(args: &VerifyArgs) -> std::result::Result<i32, CliError> {
    require_json(args.format, "verify")?;
    check_output(&args.output)?;
    let pids = if args.pids.is_empty() {
        Pid::ALL.to_vec()
    } else {
        let mut v = args
            .pids
            .iter()
            .map(|s| s.parse::<Pid>())
            .collect::<Result<Vec<_>>>()?;
        v.sort();
        v.dedup();
        v
    };
    let class = MatrixClass::from(args.class);
    if class == MatrixClass::Sectorial && args.alpha.is_none() {
        return Err(CliError::usage("--class sectorial needs --alpha"));
    }
    let k_set = args.k.map_or_else(|| vec![2, 3, 4], |k| vec![k]);
    let sources = if args.root_instances {
        k_set.iter().map(|&k| InstanceSource::Root { k }).collect()
    } else {
        vec![InstanceSource::Class {
            kind: class,
            alpha: args.alpha,
        }]
    };
    if let Some(m) = args.m {
        if !k_set.iter().all(|&k| m >= 2 && m <= k) {
            return Err(CliError::usage("--m must satisfy 2 <= m <= k"));
        }
    }
    let config = SuiteConfig {
        sources,
        samples: args.samples,
        n_min: args.n_min,
        n_max: args.n_max,
        pids,
        t_grid: args.t.map_or_else(|| (1..=9).map(|j| j as f64 / 10.0).collect(), |t| vec![t]),
        k_set,
        m_values: args.m.into_iter().collect(),
        tol: args.tol,
        sector_tol: DEFAULT_SECTOR_TOL.max(args.tol),
        seed: args.seed,
        eig_floor: DEFAULT_EIG_FLOOR,
    };
    let opts = EvalOptions {
        radius: RadiusOptions {
            grid: args.grid,
            ..RadiusOptions::default()
        },
        ..EvalOptions::default()
    };
    let start = Instant::now();
    let report = run_suite_with(&config, &opts)?;
    let violations = report.total_violations();
    emit(
        &args.output,
        &to_json_string(&WithMeta {
            report,
            meta: Meta::since(start),
        }),
    )?;
    if violations > 0 {
        eprintln!("numrange: {violations} property violations");
        Ok(EXIT_COMPUTE)
    } else {
        Ok(EXIT_OK)
    }
}

fn hunt(args: &HuntArgs) -> std::result::Result<i32, CliError> {
    require_json(args.format, "hunt")?;
    check_output(&args.output)?;
    let class = match args.class {
        ClassArg::Accretive => HuntClass::Accretive,
        ClassArg::Ad => HuntClass::AccretiveDissipative,
        other => return Err(CliError::usage(format!("hunt supports --class accretive or ad, got {other:?}"))),
    };
    let config = HuntConfig {
        n_min: args.n_min,
        n_max: args.n_max,
        t_min: args.t_min,
        t_max: args.t_max,
        budget: args.budget,
        seed: args.seed,
        perturb_scale: args.perturb_scale,
        class,
        eig_floor: DEFAULT_EIG_FLOOR,
        grid: args.grid,
    };
    let start = Instant::now();
    let report = hunt_counterexample(&config)?;
    let flagged = report.counterexample;
    emit(
        &args.output,
        &to_json_string(&WithMeta {
            report,
            meta: Meta::since(start),
        }),
    )?;
    if flagged {
        eprintln!("numrange: COUNTEREXAMPLE confirmed");
        Ok(EXIT_COUNTEREXAMPLE)
    } else {
        Ok(EXIT_OK)
    }
}

pub fn execute(cli: &Cli) -> std::result::Result<i32, CliError> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Range(a) => range(a),
        Command::Power(a) => power(a),
        Command::Verify(a) => verify(a),
        Command::Hunt(a) => hunt(a),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("numrange: {}", e.message);
            e.code
        }
    }
}
