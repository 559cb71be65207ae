//! Literal evaluators for the published closed-form plate results.
//!
//! Each formula is coded sign for sign as typeset, with no corrections, so
//! that [`adjudicate`] can hold it against the exact pipeline. Both printed
//! tensors are built from two traceless structures,
//! `S1 = g + 3 sigma sigma / sb^2 - z z` and `S2 = g / 4 - z z`.

use std::f64::consts::PI;

use serde::Serialize;

use super::closed::{self, POLE_GUARD};
use super::oracle::{stress_oracle, OracleSpec};
use super::{PlateGeometry, RadialDerivatives, StressTensor};
use crate::error::{Error, Result};
use crate::minkowski::{validate_cutoff, CutoffConfig, MinkVec3, METRIC4_DIAG};
use crate::numerics::loglog_slope;
use crate::report::{DiscrepancyReport, Thresholds};

/// Coefficients of `S1` and `S2` in a tensor `alpha S1 + beta S2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl StructureCoefficients {
    pub fn tensor(&self, sigma: &MinkVec3) -> Result<StressTensor> {
        let s1 = structure_s1(sigma)?;
        let s2 = structure_s2();
        Ok(StressTensor::from_upper(|m, n| self.alpha * s1.get(m, n) + self.beta * s2.get(m, n)))
    }
}

/// `g + 3 sigma sigma / sb^2 - z z`.
pub fn structure_s1(sigma: &MinkVec3) -> Result<StressTensor> {
    let sb = crate::minkowski::sigma_bar(sigma)?;
    let s = sigma.components();
    Ok(StressTensor::from_upper(|m, n| {
        let g = if m == n { METRIC4_DIAG[m] } else { 0.0 };
        match (m, n) {
            (3, 3) => g - 1.0,
            (_, 3) => 0.0,
            _ => g + 3.0 * s[m] * s[n] / (sb * sb),
        }
    }))
}

/// `g / 4 - z z`.
pub fn structure_s2() -> StressTensor {
    StressTensor::from_upper(|m, n| match (m, n) {
        (3, 3) => 0.25 - 1.0,
        (m, n) if m == n => 0.25 * METRIC4_DIAG[m],
        _ => 0.0,
    })
}

/// Decomposition of the tensor generated by a radial function into the two
/// printed structures: `alpha = (f2 - f1/sb) / 3`,
/// `beta = -(4/3) (f2 + 2 f1 / sb)`.
pub fn decompose_radial(d: &RadialDerivatives, sigma_bar: f64) -> StructureCoefficients {
    StructureCoefficients {
        alpha: (d.f2 - d.f1 / sigma_bar) / 3.0,
        beta: -4.0 / 3.0 * (d.f2 + 2.0 * d.f1 / sigma_bar),
    }
}

/// Cutoff-free reference `(g / 4 - z z) pi^2 / (180 a^4)`, i.e. the mode sum
/// `(1 / 2 pi^2 a^4) sum_n n^-4` with `sum_n n^-4 = pi^4 / 90`.
pub fn brown_maclay_tensor(geom: &PlateGeometry) -> StressTensor {
    let c = PI * PI / (180.0 * geom.separation().powi(4));
    structure_s2().scaled(c)
}

fn check_pole(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<()> {
    let x = (cfg.sigma_bar() - cfg.scalar()) * PI / geom.separation();
    if x < POLE_GUARD {
        return Err(Error::NearPole { x, min: POLE_GUARD });
    }
    Ok(())
}

/// The three printed terms of the small-cutoff expansion of `F`.
pub fn f_expansion(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<f64> {
    check_pole(geom, cfg)?;
    let (a, sb, s) = (geom.separation(), cfg.sigma_bar(), cfg.scalar());
    Ok(1.0 / (2.0 * PI * PI) / sb / (sb - s) + 1.0 / (4.0 * PI * a * sb) * (1.0 - s * PI / (6.0 * a))
        - (sb - s).powi(3) * PI * PI / (1440.0 * sb * a.powi(4)))
}

/// `sb` derivatives of [`f_expansion`], for comparison through the tensor
/// operator.
pub fn f_expansion_radial(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<RadialDerivatives> {
    check_pole(geom, cfg)?;
    let (a, sb, s) = (geom.separation(), cfg.sigma_bar(), cfg.scalar());
    let d = sb - s;
    // 1 / (2 pi^2 sb d)
    let k0 = 1.0 / (2.0 * PI * PI);
    let p = 1.0 / (sb * d);
    let p1 = -p * (1.0 / sb + 1.0 / d);
    let p2 = p * (2.0 / (sb * sb) + 2.0 / (sb * d) + 2.0 / (d * d));
    // c1 / sb
    let c1 = (1.0 - s * PI / (6.0 * a)) / (4.0 * PI * a);
    // -c3 d^3 / sb
    let c3 = PI * PI / (1440.0 * a.powi(4));
    let q = d.powi(3) / sb;
    let q1 = 3.0 * d * d / sb - d.powi(3) / (sb * sb);
    let q2 = 6.0 * d / sb - 6.0 * d * d / (sb * sb) + 2.0 * d.powi(3) / sb.powi(3);
    Ok(RadialDerivatives {
        f: k0 * p + c1 / sb - c3 * q,
        f1: k0 * p1 - c1 / (sb * sb) - c3 * q1,
        f2: k0 * p2 + 2.0 * c1 / sb.powi(3) - c3 * q2,
    })
}

/// Printed structure coefficients of the full (unsubtracted) tensor.
pub fn printed_full_coefficients(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<StructureCoefficients> {
    check_pole(geom, cfg)?;
    let (a, sb, s) = (geom.separation(), cfg.sigma_bar(), cfg.scalar());
    let d = sb - s;
    let pi2 = PI * PI;
    let alpha = 1.0 / (4.0 * PI * a * sb.powi(3)) * (1.0 - s * PI / (6.0 * a))
        + ((2.0 * sb - s) * d + 2.0 / 3.0 * sb * sb) / (2.0 * pi2 * sb.powi(3) * d.powi(3))
        + pi2 / (1440.0 * a.powi(4)) * (s / sb) * (s * s / (sb * sb) - 1.0);
    let beta = (1.0 - s / sb) * pi2 / (180.0 * a.powi(4)) - 4.0 / (3.0 * pi2) / sb / d.powi(3);
    Ok(StructureCoefficients { alpha, beta })
}

/// Printed structure coefficients of the vacuum-subtracted tensor.
pub fn printed_subtracted_coefficients(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<StructureCoefficients> {
    check_pole(geom, cfg)?;
    let (a, sb, s) = (geom.separation(), cfg.sigma_bar(), cfg.scalar());
    let pi2 = PI * PI;
    let alpha = 1.0 / (4.0 * PI * a * sb.powi(3)) * (1.0 - s * PI / (6.0 * a))
        + pi2 / (1440.0 * a.powi(4)) * (s / sb) * (s * s / (sb * sb) - 1.0);
    let beta = (1.0 - s / sb) * pi2 / (180.0 * a.powi(4));
    Ok(StructureCoefficients { alpha, beta })
}

pub fn stress_printed_full(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<StressTensor> {
    printed_full_coefficients(geom, cfg)?.tensor(&cfg.vector())
}

pub fn stress_printed_subtracted(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<StressTensor> {
    printed_subtracted_coefficients(geom, cfg)?.tensor(&cfg.vector())
}

/// Printed normal pressure `-pi^2 / (240 a^4) (1 - Sigma / sb)`.
pub fn pressure_printed(geom: &PlateGeometry, cfg: &CutoffConfig) -> f64 {
    -PI * PI / (240.0 * geom.separation().powi(4)) * (1.0 - cfg.ratio())
}

/// Printed energy per unit area, a-dependent part only.
pub fn energy_printed(geom: &PlateGeometry, cfg: &CutoffConfig) -> f64 {
    let (a, sb, s) = (geom.separation(), cfg.sigma_bar(), cfg.scalar());
    let s0 = cfg.vector().t;
    let r = s / sb;
    let frame = (3.0 * s0 * s0 - sb * sb) / (2.0 * sb * sb);
    -PI * PI / (720.0 * a.powi(3))
        * ((1.0 - r) - frame * (r * (r * r - 1.0) - 30.0 * s * a * a / (PI * PI * sb.powi(3))))
}

/// Options for [`adjudicate`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdjudicateOptions {
    pub thresholds: Thresholds,
    /// Also compare against the momentum-space oracle (expensive at small
    /// cutoffs).
    pub oracle: Option<OracleSpec>,
}

fn describe(cfg: &CutoffConfig) -> String {
    let v = cfg.vector();
    format!("sb={} r={} sigma=({:.6},{:.6},{:.6})", cfg.sigma_bar(), cfg.ratio(), v.t, v.x, v.y)
}

/// Worst componentwise deviation between two tensors, reported through the
/// component that attains it.
pub fn compare_tensors(label: String, a: &StressTensor, b: &StressTensor, t: Thresholds) -> DiscrepancyReport {
    let floor = 1e-12 * a.max_abs().max(b.max_abs());
    let mut worst = (0, 0, 0.0f64);
    for m in 0..4 {
        for n in m..4 {
            let (x, y) = (a.get(m, n), b.get(m, n));
            let d = (x - y).abs();
            if d == 0.0 {
                continue;
            }
            let rel = d / x.abs().max(y.abs()).max(floor);
            if rel > worst.2 {
                worst = (m, n, rel);
            }
        }
    }
    let (m, n, rel) = worst;
    let mut r = DiscrepancyReport::compare(format!("{label} T{m}{n}"), a.get(m, n), b.get(m, n), t);
    r.rel_diff = rel;
    r.verdict = t.classify(rel);
    r
}

/// The a-differenced, Sigma-dependent part of an energy-per-area function:
/// `[E(a) - E(2a)]` at the given cutoffs minus the same with `Sigma = 0`.
pub fn sigma_part<F>(energy: F, geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<f64>
where
    F: Fn(&PlateGeometry, &CutoffConfig) -> Result<f64>,
{
    let far = PlateGeometry::new(2.0 * geom.separation())?;
    let base = validate_cutoff(cfg.vector(), 0.0)?;
    let diff = |c: &CutoffConfig| -> Result<f64> { Ok(energy(geom, c)? - energy(&far, c)?) };
    Ok(diff(cfg)? - diff(&base)?)
}

/// Compares the exact pipeline, the printed formulas and optionally the
/// oracle on every grid point, then fits residual scaling exponents over
/// the rest-frame points.
pub fn adjudicate(
    geom: &PlateGeometry,
    grid: &[CutoffConfig],
    opts: &AdjudicateOptions,
) -> Result<Vec<DiscrepancyReport>> {
    let t = opts.thresholds;
    let mut out = Vec::new();
    for cfg in grid {
        let tag = describe(cfg);
        let p_exact = closed::pressure(geom, cfg)?;
        out.push(DiscrepancyReport::compare(
            format!("pressure exact vs printed [{tag}]"),
            p_exact,
            pressure_printed(geom, cfg),
            t,
        ));

        let full_exact = closed::stress_closed(geom, cfg, false)?;
        out.push(compare_tensors(
            format!("full tensor exact vs printed [{tag}]"),
            &full_exact,
            &stress_printed_full(geom, cfg)?,
            t,
        ));
        out.push(compare_tensors(
            format!("subtracted tensor exact vs printed [{tag}]"),
            &closed::stress_closed(geom, cfg, true)?,
            &stress_printed_subtracted(geom, cfg)?,
            t,
        ));

        if let Some(spec) = &opts.oracle {
            let o = stress_oracle(geom, cfg, spec)?;
            out.push(compare_tensors(format!("full tensor exact vs oracle [{tag}]"), &full_exact, &o.tensor, t));
        }

        let residual_t33 = closed::pressure(geom, cfg)?;
        let residual = closed::pressure_energy_residual(geom, cfg, closed::default_da(geom))?;
        out.push(
            DiscrepancyReport::compare(
                format!("pressure vs -dE/da [{tag}]"),
                residual_t33,
                residual_t33 - residual,
                t,
            )
            .with_note(format!("residual {residual:e}")),
        );

        if cfg.scalar() > 0.0 {
            let exact = sigma_part(closed::energy_density_area, geom, cfg)?;
            let printed = sigma_part(|g, c| Ok(energy_printed(g, c)), geom, cfg)?;
            out.push(
                DiscrepancyReport::compare(format!("energy Sigma term exact vs printed [{tag}]"), exact, printed, t)
                    .with_note(format!("ratio {:.6}", exact / printed)),
            );
        }
    }
    out.extend(residual_scaling(geom, grid)?);
    Ok(out)
}

/// Log-log slopes of `|T33 + dE/da|` against `sb` over rest-frame points,
/// grouped at fixed `Sigma / sb` and at fixed `Sigma`; the claimed law is
/// `Sigma / (a^2 sb^3)`, slope -3 in both readings.
pub fn residual_scaling(geom: &PlateGeometry, grid: &[CutoffConfig]) -> Result<Vec<DiscrepancyReport>> {
    let rest: Vec<&CutoffConfig> =
        grid.iter().filter(|c| c.vector().spatial_norm() == 0.0 && c.scalar() > 0.0).collect();
    let mut out = Vec::new();
    for (kind, key) in [("ratio", 0usize), ("Sigma", 1usize)] {
        let mut keys: Vec<f64> = Vec::new();
        for c in &rest {
            let k = if key == 0 { c.ratio() } else { c.scalar() };
            if !keys.iter().any(|x| (x - k).abs() <= 1e-12 * k.abs()) {
                keys.push(k);
            }
        }
        for k in keys {
            let pts: Vec<(f64, f64)> = rest
                .iter()
                .filter(|c| {
                    let v = if key == 0 { c.ratio() } else { c.scalar() };
                    (v - k).abs() <= 1e-12 * k.abs()
                })
                .map(|c| {
                    let r = closed::pressure_energy_residual(geom, c, closed::default_da(geom))?;
                    Ok((c.sigma_bar(), r.abs()))
                })
                .collect::<Result<_>>()?;
            let distinct = {
                let mut s: Vec<f64> = pts.iter().map(|p| p.0).collect();
                s.sort_by(f64::total_cmp);
                s.dedup();
                s.len()
            };
            if distinct < 2 {
                continue;
            }
            let slope = loglog_slope(&pts)?;
            out.push(
                DiscrepancyReport::slope(format!("residual slope at fixed {kind}={k}"), slope, -3.0, 0.1)
                    .with_note(format!("{} points", pts.len())),
            );
        }
    }
    Ok(out)
}
