//! Parameter sweeps: grid expansion, parallel evaluation and serialized
//! CSV/JSON emission in grid order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minkowski::{Boost, CutoffConfig};
use crate::plates::closed::{energy_density_area, pressure, pressure_energy_residual, stress_closed};
use crate::plates::oracle::{stress_oracle, OracleSpec};
use crate::plates::printed::{energy_printed, pressure_printed, stress_printed_full};
use crate::plates::PlateGeometry;
use crate::report::rel_diff;
use crate::sphere::{delta_e_closed_derived, delta_e_closed_printed, delta_e_direct, delta_e_integral, e_sigma, SphereConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum Observable {
    Pressure,
    EnergyDensity,
    Residual,
    /// Component `T^{mu nu}` of the unsubtracted tensor.
    StressComponent(usize, usize),
    SphereDeltaE,
    SphereESigma,
}

impl Observable {
    pub fn is_sphere(self) -> bool {
        matches!(self, Observable::SphereDeltaE | Observable::SphereESigma)
    }

    pub fn supports(self, p: Pipeline) -> bool {
        use Pipeline::*;
        match self {
            Observable::Pressure | Observable::EnergyDensity => matches!(p, Closed | Printed),
            Observable::Residual => p == Closed,
            Observable::StressComponent(..) => matches!(p, Closed | Oracle | Printed),
            Observable::SphereDeltaE => matches!(p, Integral | Direct | ClosedPrinted | ClosedDerived),
            Observable::SphereESigma => p == Direct,
        }
    }

    /// Pipelines used when none are requested.
    pub fn default_pipelines(self) -> Vec<Pipeline> {
        use Pipeline::*;
        match self {
            Observable::Pressure | Observable::EnergyDensity => vec![Closed, Printed],
            Observable::Residual => vec![Closed],
            Observable::StressComponent(..) => vec![Closed, Printed],
            Observable::SphereDeltaE => vec![Integral, ClosedPrinted, ClosedDerived],
            Observable::SphereESigma => vec![Direct],
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Pressure => f.write_str("pressure"),
            Observable::EnergyDensity => f.write_str("energy_density"),
            Observable::Residual => f.write_str("residual"),
            Observable::StressComponent(m, n) => write!(f, "stress_component({m},{n})"),
            Observable::SphereDeltaE => f.write_str("sphere_delta_e"),
            Observable::SphereESigma => f.write_str("sphere_e_sigma"),
        }
    }
}

impl From<Observable> for String {
    fn from(o: Observable) -> String {
        o.to_string()
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "pressure" => Observable::Pressure,
            "energy_density" => Observable::EnergyDensity,
            "residual" => Observable::Residual,
            "sphere_delta_e" => Observable::SphereDeltaE,
            "sphere_e_sigma" => Observable::SphereESigma,
            _ => {
                // stress_component(m,n) or the short form Tmn
                let idx = s
                    .strip_prefix("stress_component(")
                    .and_then(|r| r.strip_suffix(')'))
                    .map(|r| r.split(',').map(str::trim).collect::<Vec<_>>())
                    .or_else(|| {
                        let d = s.strip_prefix('T')?;
                        (d.len() == 2).then(|| vec![&d[..1], &d[1..]])
                    })
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown observable '{s}'")))?;
                let parse = |t: &str| match t.parse::<usize>() {
                    Ok(i) if i < 4 => Ok(i),
                    _ => Err(Error::InvalidConfig(format!("bad tensor index '{t}' in '{s}'"))),
                };
                if idx.len() != 2 {
                    return Err(Error::InvalidConfig(format!("stress_component needs two indices, got '{s}'")));
                }
                Observable::StressComponent(parse(idx[0])?, parse(idx[1])?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Closed,
    Oracle,
    Printed,
    Integral,
    Direct,
    ClosedPrinted,
    ClosedDerived,
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pipeline::Closed => "closed",
            Pipeline::Oracle => "oracle",
            Pipeline::Printed => "printed",
            Pipeline::Integral => "integral",
            Pipeline::Direct => "direct",
            Pipeline::ClosedPrinted => "closed_printed",
            Pipeline::ClosedDerived => "closed_derived",
        })
    }
}

impl FromStr for Pipeline {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "closed" => Pipeline::Closed,
            "oracle" => Pipeline::Oracle,
            "printed" => Pipeline::Printed,
            "integral" => Pipeline::Integral,
            "direct" => Pipeline::Direct,
            "closed_printed" => Pipeline::ClosedPrinted,
            "closed_derived" => Pipeline::ClosedDerived,
            other => return Err(Error::InvalidConfig(format!("unknown pipeline '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidConfig(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateGrid {
    pub a: Vec<f64>,
    pub sigma_bar: Vec<f64>,
    pub ratio: Vec<f64>,
    pub rapidity: Vec<f64>,
    /// In-plane boost direction shared by every point.
    pub direction: [f64; 2],
}

impl Default for PlateGrid {
    fn default() -> Self {
        Self {
            a: vec![1.0],
            sigma_bar: Vec::new(),
            ratio: vec![0.0],
            rapidity: vec![0.0],
            direction: [1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereGrid {
    pub a: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `Sigma / sigma`.
    pub ratio: Vec<f64>,
    pub phi: Vec<f64>,
    pub l_max: usize,
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self {
            a: vec![1.0],
            sigma: Vec::new(),
            ratio: vec![0.0],
            phi: vec![SphereConfig::DEFAULT_PHI],
            l_max: SphereConfig::DEFAULT_L_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub oracle: OracleSpec,
    /// Absolute tolerance on the sphere series.
    pub sphere_tol: f64,
    /// Plate-separation step of the residual, relative to `a`.
    pub da_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            oracle: OracleSpec::default(),
            sphere_tol: SphereConfig::DEFAULT_TOL,
            da_rel: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub observable: Observable,
    pub pipelines: Vec<Pipeline>,
    pub plates: PlateGrid,
    pub sphere: SphereGrid,
    pub tolerances: Tolerances,
}

impl SweepSpec {
    pub fn new(observable: Observable) -> Self {
        Self {
            observable,
            pipelines: observable.default_pipelines(),
            plates: PlateGrid::default(),
            sphere: SphereGrid::default(),
            tolerances: Tolerances::default(),
        }
    }

    /// Pressure at `a = 1`, `sigma_bar = 0.01`, `r` in {0, 0.5}, closed and
    /// printed.
    pub fn example_pressure() -> Self {
        let mut s = Self::new(Observable::Pressure);
        s.plates.sigma_bar = vec![0.01];
        s.plates.ratio = vec![0.0, 0.5];
        s
    }

    fn validate(&self) -> Result<()> {
        if self.pipelines.is_empty() {
            return Err(Error::InvalidConfig("no pipelines selected".into()));
        }
        for &p in &self.pipelines {
            if !self.observable.supports(p) {
                return Err(Error::InvalidConfig(format!("pipeline {p} does not provide {}", self.observable)));
            }
        }
        let t = &self.tolerances;
        if !(t.da_rel > 0.0 && t.da_rel < 1.0) {
            return Err(Error::InvalidConfig(format!("da must lie in (0, 1) relative to a, got {}", t.da_rel)));
        }
        if !(t.oracle.quad_tol > 0.0 && t.oracle.quad_tol < 1.0) {
            return Err(Error::InvalidConfig(format!("quad_tol must lie in (0, 1), got {}", t.oracle.quad_tol)));
        }
        Ok(())
    }

    /// Expands and validates the grid in emission order.
    pub fn points(&self) -> Result<Vec<Point>> {
        self.validate()?;
        let mut out = Vec::new();
        if self.observable.is_sphere() {
            let g = &self.sphere;
            for &a in &g.a {
                for &sigma in &g.sigma {
                    for &r in &g.ratio {
                        for &phi in &g.phi {
                            let cfg = SphereConfig::with_all(a, sigma, r * sigma, phi, g.l_max, self.tolerances.sphere_tol)?;
                            out.push(Point::Sphere { cfg, ratio: r });
                        }
                    }
                }
            }
        } else {
            let g = &self.plates;
            for &a in &g.a {
                let geom = PlateGeometry::new(a)?;
                for &sb in &g.sigma_bar {
                    for &r in &g.ratio {
                        for &eta in &g.rapidity {
                            let cfg = CutoffConfig::rest(sb, r)?.boosted(&Boost::new(eta, g.direction)?)?;
                            out.push(Point::Plate { geom, cfg, ratio: r, rapidity: eta });
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidConfig("empty grid".into()));
        }
        Ok(out)
    }
}

/// One validated grid point. `ratio` is echoed as given rather than
/// recomputed from the cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Plate {
        geom: PlateGeometry,
        cfg: CutoffConfig,
        ratio: f64,
        rapidity: f64,
    },
    Sphere {
        cfg: SphereConfig,
        ratio: f64,
    },
}

/// Value with error estimate; analytic pipelines report zero error.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Evaluated {
    value: f64,
    abs_err: f64,
}

fn exact(value: f64) -> Evaluated {
    Evaluated { value, abs_err: 0.0 }
}

fn evaluate(obs: Observable, pipeline: Pipeline, point: &Point, tol: &Tolerances) -> Result<Evaluated> {
    use Pipeline::*;
    match *point {
        Point::Plate { geom, cfg, .. } => match (obs, pipeline) {
            (Observable::Pressure, Closed) => Ok(exact(pressure(&geom, &cfg)?)),
            (Observable::Pressure, Printed) => Ok(exact(pressure_printed(&geom, &cfg))),
            (Observable::EnergyDensity, Closed) => Ok(exact(energy_density_area(&geom, &cfg)?)),
            (Observable::EnergyDensity, Printed) => Ok(exact(energy_printed(&geom, &cfg))),
            (Observable::Residual, Closed) => {
                Ok(exact(pressure_energy_residual(&geom, &cfg, tol.da_rel * geom.separation())?))
            }
            (Observable::StressComponent(m, n), Closed) => Ok(exact(stress_closed(&geom, &cfg, false)?.get(m, n))),
            (Observable::StressComponent(m, n), Printed) => Ok(exact(stress_printed_full(&geom, &cfg)?.get(m, n))),
            (Observable::StressComponent(m, n), Oracle) => {
                let o = stress_oracle(&geom, &cfg, &tol.oracle)?;
                Ok(Evaluated { value: o.tensor.get(m, n), abs_err: o.abs_error.get(m, n) })
            }
            _ => Err(Error::InvalidConfig(format!("pipeline {pipeline} does not provide {obs}"))),
        },
        Point::Sphere { cfg, .. } => {
            let q = match (obs, pipeline) {
                (Observable::SphereDeltaE, Integral) => delta_e_integral(&cfg)?,
                (Observable::SphereDeltaE, Direct) => delta_e_direct(&cfg)?,
                (Observable::SphereDeltaE, ClosedPrinted) => return Ok(exact(delta_e_closed_printed(&cfg))),
                (Observable::SphereDeltaE, ClosedDerived) => return Ok(exact(delta_e_closed_derived(&cfg))),
                (Observable::SphereESigma, Direct) => e_sigma(&cfg, true)?,
                _ => return Err(Error::InvalidConfig(format!("pipeline {pipeline} does not provide {obs}"))),
            };
            Ok(Evaluated { value: q.value, abs_err: q.abs_error_estimate })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateRow {
    pub observable: String,
    pub pipeline: Pipeline,
    pub a: f64,
    pub sigma0: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub sigma_bar: f64,
    #[serde(rename = "Sigma")]
    pub scalar: f64,
    pub ratio: f64,
    pub rapidity: f64,
    pub value: f64,
    pub abs_err_est: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereRow {
    pub observable: String,
    pub pipeline: Pipeline,
    pub a: f64,
    pub sigma: f64,
    #[serde(rename = "Sigma")]
    pub scalar: f64,
    pub r: f64,
    pub phi: f64,
    pub l_max: usize,
    pub value: f64,
    pub abs_err_est: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Row {
    Plate(PlateRow),
    Sphere(SphereRow),
}

pub const PLATE_COLUMNS: [&str; 13] = [
    "observable", "pipeline", "a", "sigma0", "sigma_x", "sigma_y", "sigma_bar", "Sigma", "ratio", "rapidity", "value",
    "abs_err_est", "converged",
];

pub const SPHERE_COLUMNS: [&str; 11] =
    ["observable", "pipeline", "a", "sigma", "Sigma", "r", "phi", "l_max", "value", "abs_err_est", "converged"];

impl Row {
    pub fn value(&self) -> f64 {
        match self {
            Row::Plate(r) => r.value,
            Row::Sphere(r) => r.value,
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            Row::Plate(r) => r.converged,
            Row::Sphere(r) => r.converged,
        }
    }

    pub fn abs_err_est(&self) -> f64 {
        match self {
            Row::Plate(r) => r.abs_err_est,
            Row::Sphere(r) => r.abs_err_est,
        }
    }

    /// Fields in column order, floats in shortest round-trip form.
    fn record(&self) -> Vec<String> {
        match self {
            Row::Plate(r) => vec![
                r.observable.clone(),
                r.pipeline.to_string(),
                r.a.to_string(),
                r.sigma0.to_string(),
                r.sigma_x.to_string(),
                r.sigma_y.to_string(),
                r.sigma_bar.to_string(),
                r.scalar.to_string(),
                r.ratio.to_string(),
                r.rapidity.to_string(),
                r.value.to_string(),
                r.abs_err_est.to_string(),
                r.converged.to_string(),
            ],
            Row::Sphere(r) => vec![
                r.observable.clone(),
                r.pipeline.to_string(),
                r.a.to_string(),
                r.sigma.to_string(),
                r.scalar.to_string(),
                r.r.to_string(),
                r.phi.to_string(),
                r.l_max.to_string(),
                r.value.to_string(),
                r.abs_err_est.to_string(),
                r.converged.to_string(),
            ],
        }
    }
}

fn make_row(obs: Observable, pipeline: Pipeline, point: &Point, e: Evaluated, converged: bool) -> Row {
    match *point {
        Point::Plate { geom, cfg, ratio, rapidity } => {
            let v = cfg.vector();
            Row::Plate(PlateRow {
                observable: obs.to_string(),
                pipeline,
                a: geom.separation(),
                sigma0: v.t,
                sigma_x: v.x,
                sigma_y: v.y,
                sigma_bar: cfg.sigma_bar(),
                scalar: cfg.scalar(),
                ratio,
                rapidity,
                value: e.value,
                abs_err_est: e.abs_err,
                converged,
            })
        }
        Point::Sphere { cfg, ratio } => Row::Sphere(SphereRow {
            observable: obs.to_string(),
            pipeline,
            a: cfg.radius(),
            sigma: cfg.sigma(),
            scalar: cfg.scalar(),
            r: ratio,
            phi: cfg.phi(),
            l_max: cfg.l_max(),
            value: e.value,
            abs_err_est: e.abs_err,
            converged,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub row: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub failures: usize,
    /// Largest relative spread between pipelines at one grid point.
    pub max_cross_pipeline_deviation: f64,
    pub errors: Vec<RowError>,
    /// `abs_err_est` of every row, in emission order.
    pub row_errors: Vec<f64>,
}

/// Evaluates every (point, pipeline) pair on the current rayon pool.
pub fn compute_rows(spec: &SweepSpec) -> Result<(Vec<Row>, SweepSummary)> {
    let points = spec.points()?;
    let pairs: Vec<(usize, Pipeline)> = (0..points.len())
        .flat_map(|i| spec.pipelines.iter().map(move |&p| (i, p)))
        .collect();
    let evaluated: Vec<Result<Evaluated>> = pairs
        .par_iter()
        .map(|&(i, p)| evaluate(spec.observable, p, &points[i], &spec.tolerances))
        .collect();

    let mut rows = Vec::with_capacity(pairs.len());
    let mut errors = Vec::new();
    for (k, (&(i, p), res)) in pairs.iter().zip(evaluated).enumerate() {
        let (e, ok) = match res {
            Ok(e) => (e, true),
            Err(err) => {
                let e = match err {
                    Error::NoConvergence { value, abs_error, .. } => Evaluated { value, abs_err: abs_error },
                    _ => Evaluated { value: f64::NAN, abs_err: f64::NAN },
                };
                errors.push(RowError { row: k, message: err.to_string() });
                (e, false)
            }
        };
        rows.push(make_row(spec.observable, p, &points[i], e, ok));
    }

    let per_point = spec.pipelines.len();
    let mut max_dev = 0.0f64;
    for chunk in rows.chunks(per_point) {
        for (i, x) in chunk.iter().enumerate() {
            for y in &chunk[i + 1..] {
                if x.converged() && y.converged() && x.value().is_finite() && y.value().is_finite() {
                    max_dev = max_dev.max(rel_diff(x.value(), y.value()));
                }
            }
        }
    }
    let summary = SweepSummary {
        rows: rows.len(),
        failures: errors.len(),
        max_cross_pipeline_deviation: max_dev,
        row_errors: rows.iter().map(Row::abs_err_est).collect(),
        errors,
    };
    Ok((rows, summary))
}

/// Serializes rows; the bytes depend only on the rows.
pub fn write_rows<W: Write + ?Sized>(rows: &[Row], sphere: bool, out: &mut W, format: Format) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidConfig(format!("cannot write output: {e}"));
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| Error::InvalidConfig(format!("cannot write output: {e}"));
            if sphere {
                w.write_record(SPHERE_COLUMNS).map_err(csv_err)?;
            } else {
                w.write_record(PLATE_COLUMNS).map_err(csv_err)?;
            }
            for r in rows {
                w.write_record(r.record()).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)
                .map_err(|e| Error::InvalidConfig(format!("cannot write output: {e}")))?;
            out.write_all(b"\n").map_err(io)?;
        }
    }
    Ok(())
}

/// Computes the sweep and writes it to `out`.
pub fn run_sweep<W: Write + ?Sized>(spec: &SweepSpec, out: &mut W, format: Format) -> Result<SweepSummary> {
    let (rows, summary) = compute_rows(spec)?;
    write_rows(&rows, spec.observable.is_sphere(), out, format)?;
    Ok(summary)
}
