//! Command-line front end.

pub mod config;
pub mod sweep;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minkowski::{Boost, CutoffConfig};
use crate::plates::closed::stress_closed;
use crate::plates::oracle::stress_oracle;
use crate::plates::printed::{stress_printed_full, stress_printed_subtracted};
use crate::plates::{PlateGeometry, StressTensor};
use crate::verify::{all_passed, verify_all, Profile};

use config::{parse_direction, parse_pipelines, ConfigFile};
use sweep::{compute_rows, write_rows, Format, Observable, Pipeline, SweepSpec, SweepSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

/// Environment fallback for `--jobs`.
pub const JOBS_ENV: &str = "CASIMIR_LAB_JOBS";

#[derive(Debug, Parser)]
#[command(name = "casimir-lab", version, about = "Regularized Casimir stress tensors and sphere energy shifts")]
pub struct Cli {
    /// Worker threads for grid evaluation (falls back to CASIMIR_LAB_JOBS).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parallel-plate computations.
    #[command(subcommand)]
    Plates(PlatesCommand),
    /// Conducting-sphere energy.
    #[command(subcommand)]
    Sphere(SphereCommand),
    /// Run the acceptance matrix.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum PlatesCommand {
    /// Full stress tensor at one configuration.
    Stress(StressArgs),
    /// Sweep any plate observable over a grid.
    Sweep(PlateSweepArgs),
    /// Pressure/energy residual over a grid.
    Residual(PlateSweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum SphereCommand {
    /// Energy shift from the secondary cutoff.
    DeltaE(SphereSweepArgs),
    /// Cutoff-dependent energy itself.
    Esigma(SphereSweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (default stdout); a `.manifest.json` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    pub format: Format,
    /// key=value configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated pipelines.
    #[arg(long)]
    pub pipelines: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PlateGridArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub sigma_bar: Option<Vec<f64>>,
    /// Sigma / sigma_bar.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub ratio: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub rapidity: Option<Vec<f64>>,
    /// In-plane boost direction "x,y".
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<String>,
    /// Relative quadrature tolerance of the oracle.
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// Plate-separation step of the residual, relative to a.
    #[arg(long)]
    pub da: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PlateSweepArgs {
    /// pressure, energy_density, residual or stress_component(m,n).
    #[arg(long)]
    pub observable: Option<String>,
    #[command(flatten)]
    pub grid: PlateGridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StressArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long)]
    pub sigma_bar: f64,
    #[arg(long, default_value_t = 0.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rapidity: f64,
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    pub direction: String,
    /// closed, printed or oracle.
    #[arg(long, default_value = "closed")]
    pub pipeline: String,
    /// Drop the separation-independent part (closed and printed only).
    #[arg(long)]
    pub subtract: bool,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SphereSweepArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub sigma: Option<Vec<f64>>,
    /// Sigma / sigma.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub ratio: Option<Vec<f64>>,
    /// Contour angle.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub phi: Option<Vec<f64>>,
    #[arg(long)]
    pub l_max: Option<usize>,
    /// Absolute tolerance on the series.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "default", value_parser = parse_profile)]
    pub profile: Profile,
    /// Shorthand for --profile fast.
    #[arg(long)]
    pub fast: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    pub format: Format,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_profile(s: &str) -> std::result::Result<Profile, String> {
    s.parse()
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } | Error::TailTooFat { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_CONFIG,
    }
}

/// `--jobs`, else `CASIMIR_LAB_JOBS`, else rayon's default.
pub fn resolve_jobs(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(JOBS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidConfig(format!("{JOBS_ENV}='{v}' is not a thread count"))),
        Err(_) => Ok(None),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let jobs = match resolve_jobs(cli.jobs) {
        Ok(j) => j,
        Err(e) => return fail(&e),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return fail(&Error::InvalidConfig(format!("cannot start worker pool: {e}"))),
    };
    pool.install(|| dispatch(cli.command))
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}

fn dispatch(command: Command) -> i32 {
    let res = match command {
        Command::Plates(PlatesCommand::Stress(a)) => plates_stress(&a),
        Command::Plates(PlatesCommand::Sweep(a)) => plate_spec(&a, None).and_then(|s| sweep(&s, &a.output)),
        Command::Plates(PlatesCommand::Residual(a)) => {
            plate_spec(&a, Some(Observable::Residual)).and_then(|s| sweep(&s, &a.output))
        }
        Command::Sphere(SphereCommand::DeltaE(a)) => {
            sphere_spec(&a, Observable::SphereDeltaE).and_then(|s| sweep(&s, &a.output))
        }
        Command::Sphere(SphereCommand::Esigma(a)) => {
            sphere_spec(&a, Observable::SphereESigma).and_then(|s| sweep(&s, &a.output))
        }
        Command::Verify(a) => verify(&a),
    };
    res.unwrap_or_else(|e| fail(&e))
}

fn base_spec(observable: Observable, output: &OutputArgs) -> Result<SweepSpec> {
    let mut spec = SweepSpec::new(observable);
    if let Some(path) = &output.config {
        ConfigFile::read(path)?.apply(&mut spec)?;
    }
    if let Some(p) = &output.pipelines {
        spec.pipelines = parse_pipelines(p)?;
    }
    Ok(spec)
}

fn plate_spec(args: &PlateSweepArgs, fixed: Option<Observable>) -> Result<SweepSpec> {
    let observable = match (fixed, &args.observable) {
        (Some(o), None) => o,
        (Some(o), Some(s)) if s.parse::<Observable>()? == o => o,
        (Some(o), Some(s)) => return Err(Error::InvalidConfig(format!("observable '{s}' conflicts with {o}"))),
        (None, Some(s)) => s.parse()?,
        (None, None) => Observable::Pressure,
    };
    if observable.is_sphere() {
        return Err(Error::InvalidConfig(format!("{observable} is a sphere observable")));
    }
    let mut spec = base_spec(observable, &args.output)?;
    let g = &args.grid;
    let p = &mut spec.plates;
    if let Some(v) = &g.a {
        p.a = v.clone();
    }
    if let Some(v) = &g.sigma_bar {
        p.sigma_bar = v.clone();
    }
    if let Some(v) = &g.ratio {
        p.ratio = v.clone();
    }
    if let Some(v) = &g.rapidity {
        p.rapidity = v.clone();
    }
    if let Some(d) = &g.direction {
        p.direction = parse_direction("direction", d)?;
    }
    if let Some(t) = g.quad_tol {
        spec.tolerances.oracle.quad_tol = t;
    }
    if let Some(d) = g.da {
        spec.tolerances.da_rel = d;
    }
    Ok(spec)
}

fn sphere_spec(args: &SphereSweepArgs, observable: Observable) -> Result<SweepSpec> {
    let mut spec = base_spec(observable, &args.output)?;
    let s = &mut spec.sphere;
    if let Some(v) = &args.a {
        s.a = v.clone();
    }
    if let Some(v) = &args.sigma {
        s.sigma = v.clone();
    }
    if let Some(v) = &args.ratio {
        s.ratio = v.clone();
    }
    if let Some(v) = &args.phi {
        s.phi = v.clone();
    }
    if let Some(l) = args.l_max {
        s.l_max = l;
    }
    if let Some(t) = args.tol {
        spec.tolerances.sphere_tol = t;
    }
    Ok(spec)
}

/// Sidecar describing how an output file was produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub threads: usize,
    pub spec: &'a SweepSpec,
    pub summary: &'a SweepSummary,
}

impl<'a> RunManifest<'a> {
    pub fn new(spec: &'a SweepSpec, summary: &'a SweepSummary) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            threads: rayon::current_num_threads(),
            spec,
            summary,
        }
    }
}

/// `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidConfig(format!("cannot write {}: {e}", path.display()))
}

/// Opens `path` or stdout and hands the writer to `f`.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_err(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| io_err(p, e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush().map_err(|e| Error::InvalidConfig(format!("cannot write stdout: {e}")))
        }
    }
}

fn sweep(spec: &SweepSpec, output: &OutputArgs) -> Result<i32> {
    // nothing is written unless the whole grid validates
    let (rows, summary) = compute_rows(spec)?;
    with_output(output.out.as_deref(), |w| write_rows(&rows, spec.observable.is_sphere(), w, output.format))?;
    if let Some(out) = &output.out {
        let path = manifest_path(out);
        let text = serde_json::to_string_pretty(&RunManifest::new(spec, &summary))
            .map_err(|e| Error::InvalidConfig(format!("cannot encode manifest: {e}")))?;
        std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
    }
    for e in &summary.errors {
        eprintln!("row {}: {}", e.row, e.message);
    }
    Ok(if summary.failures > 0 { EXIT_NO_CONVERGENCE } else { EXIT_OK })
}

#[derive(Serialize)]
struct StressOutput {
    pipeline: String,
    subtracted: bool,
    a: f64,
    config: CutoffConfig,
    tensor: StressTensor,
    abs_error: StressTensor,
}

fn plates_stress(args: &StressArgs) -> Result<i32> {
    let geom = PlateGeometry::new(args.a)?;
    let dir = parse_direction("direction", &args.direction)?;
    let cfg = CutoffConfig::rest(args.sigma_bar, args.ratio)?.boosted(&Boost::new(args.rapidity, dir)?)?;
    let pipeline: Pipeline = args.pipeline.parse()?;
    let (tensor, abs_error) = match (pipeline, args.subtract) {
        (Pipeline::Closed, s) => (stress_closed(&geom, &cfg, s)?, StressTensor::zero()),
        (Pipeline::Printed, false) => (stress_printed_full(&geom, &cfg)?, StressTensor::zero()),
        (Pipeline::Printed, true) => (stress_printed_subtracted(&geom, &cfg)?, StressTensor::zero()),
        (Pipeline::Oracle, false) => {
            let mut spec = crate::plates::oracle::OracleSpec::default();
            if let Some(t) = args.quad_tol {
                spec = spec.with_tol(t);
            }
            let o = stress_oracle(&geom, &cfg, &spec)?;
            (o.tensor, o.abs_error)
        }
        (Pipeline::Oracle, true) => {
            return Err(Error::InvalidConfig("the oracle computes the unsubtracted tensor only".into()))
        }
        (p, _) => return Err(Error::InvalidConfig(format!("pipeline {p} does not provide the plate tensor"))),
    };
    let out = StressOutput {
        pipeline: pipeline.to_string(),
        subtracted: args.subtract,
        a: args.a,
        config: cfg,
        tensor,
        abs_error,
    };
    with_output(args.out.as_deref(), |w| {
        let werr = |e: std::io::Error| Error::InvalidConfig(format!("cannot write output: {e}"));
        match args.format {
            Format::Json => {
                let text = serde_json::to_string_pretty(&out)
                    .map_err(|e| Error::InvalidConfig(format!("cannot encode output: {e}")))?;
                writeln!(w, "{text}").map_err(werr)
            }
            Format::Csv => {
                writeln!(w, "mu,nu,value,abs_err_est").map_err(werr)?;
                for m in 0..4 {
                    for n in 0..4 {
                        writeln!(w, "{m},{n},{},{}", out.tensor.get(m, n), out.abs_error.get(m, n)).map_err(werr)?;
                    }
                }
                Ok(())
            }
        }
    })?;
    Ok(EXIT_OK)
}

fn verify(args: &VerifyArgs) -> Result<i32> {
    let profile = if args.fast { Profile::Fast } else { args.profile };
    let outcomes = verify_all(profile);
    with_output(args.out.as_deref(), |w| {
        let werr = |e: std::io::Error| Error::InvalidConfig(format!("cannot write output: {e}"));
        match args.format {
            Format::Json => {
                let text = serde_json::to_string_pretty(&outcomes)
                    .map_err(|e| Error::InvalidConfig(format!("cannot encode output: {e}")))?;
                writeln!(w, "{text}").map_err(werr)
            }
            Format::Csv => {
                for o in &outcomes {
                    writeln!(w, "{o}").map_err(werr)?;
                }
                let failed = outcomes.iter().filter(|o| !o.passed()).count();
                writeln!(w, "{} criteria, {failed} failed", outcomes.len()).map_err(werr)
            }
        }
    })?;
    Ok(if all_passed(&outcomes) { EXIT_OK } else { EXIT_ACCEPTANCE })
}
