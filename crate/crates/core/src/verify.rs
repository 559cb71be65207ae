//! The acceptance matrix: every quantitative claim checked at its stated
//! tolerance, one outcome per criterion.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::minkowski::{Boost, CutoffConfig};
use crate::numerics::{loglog_slope, richardson};
use crate::plates::closed::{default_da, pressure, pressure_energy_residual, stress_closed};
use crate::plates::oracle::{eigenmode_check, eigenmode_check_detuned, stress_fd, stress_oracle, OracleSpec};
use crate::plates::printed::{
    adjudicate, brown_maclay_tensor, printed_subtracted_coefficients, stress_printed_full, stress_printed_subtracted,
    AdjudicateOptions,
};
use crate::plates::{PlateGeometry, StressTensor};
use crate::report::{rel_diff, DiscrepancyReport, Thresholds};
use crate::sphere::{
    delta_e_closed_derived, delta_e_closed_printed, delta_e_direct, delta_e_integral, e_sigma, SphereConfig,
};

/// Reference magnitude `pi^2 / 240` of the cutoff-free pressure.
pub const PRESSURE_REFERENCE: f64 = PI * PI / 240.0;

/// Seed of the random configurations in the tracelessness sweep.
pub const RANDOM_SEED: u64 = 0x00C0_FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// No oracle quadrature and no direct sphere series.
    Fast,
    Default,
    Thorough,
}

impl Profile {
    fn oracle(self) -> bool {
        self != Profile::Fast
    }
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fast" => Ok(Profile::Fast),
            "default" => Ok(Profile::Default),
            "thorough" => Ok(Profile::Thorough),
            _ => Err(format!("unknown profile '{s}' (expected fast, default or thorough)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    /// Consistency measurements reported alongside the verdict.
    pub findings: Vec<DiscrepancyReport>,
}

impl CriterionOutcome {
    fn new(id: u8, title: &'static str, pass: bool, detail: String) -> Self {
        Self {
            id,
            title,
            status: if pass { Status::Pass } else { Status::Fail },
            detail,
            findings: Vec::new(),
        }
    }

    fn skipped(id: u8, title: &'static str, why: &str) -> Self {
        Self {
            id,
            title,
            status: Status::Skip,
            detail: why.to_string(),
            findings: Vec::new(),
        }
    }

    fn errored(id: u8, title: &'static str, err: crate::Error) -> Self {
        Self::new(id, title, false, format!("error: {err}"))
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "criterion {:>2} {} {:<34} {}", self.id, self.status, self.title, self.detail)?;
        for r in &self.findings {
            write!(f, "\n    finding: {r}")?;
        }
        Ok(())
    }
}

fn geom(a: f64) -> Result<PlateGeometry> {
    PlateGeometry::new(a)
}

fn rest(sb: f64, r: f64) -> Result<CutoffConfig> {
    CutoffConfig::rest(sb, r)
}

fn boosted(sb: f64, r: f64, eta: f64, dir: [f64; 2]) -> Result<CutoffConfig> {
    rest(sb, r)?.boosted(&Boost::new(eta, dir)?)
}

// an in-plane direction off both axes, so no component vanishes by symmetry
const DIAGONAL: [f64; 2] = [0.6, 0.8];

fn run(id: u8, title: &'static str, f: impl FnOnce() -> Result<CriterionOutcome>) -> CriterionOutcome {
    f().unwrap_or_else(|e| CriterionOutcome::errored(id, title, e))
}

pub fn criterion_1() -> CriterionOutcome {
    let title = "pressure law reproduction";
    run(1, title, || {
        let g = geom(1.0)?;
        let mut pass = true;
        let mut parts = Vec::new();
        for r in [0.0, 0.25, 0.5, 0.75] {
            let target = -PRESSURE_REFERENCE * (1.0 - r);
            let e1 = rel_diff(pressure(&g, &rest(0.01, r)?)?, target);
            let e2 = rel_diff(pressure(&g, &rest(0.005, r)?)?, target);
            let ratio = e1 / e2;
            let ok = e1 <= 1e-3 && e2 <= 2.5e-4 && (ratio - 4.0).abs() <= 0.2;
            pass &= ok;
            parts.push(format!("r={r}: {e1:.2e}/{e2:.2e} ratio {ratio:.3}"));
        }
        Ok(CriterionOutcome::new(1, title, pass, parts.join("; ")))
    })
}

pub fn criterion_2() -> CriterionOutcome {
    let title = "cutoff-free limit";
    run(2, title, || {
        let g = geom(1.0)?;
        let pts = [0.02, 0.01, 0.005]
            .iter()
            .map(|&sb| Ok((sb, pressure(&g, &rest(sb, 0.0)?)?)))
            .collect::<Result<Vec<_>>>()?;
        let lim = richardson(&pts, 2)?;
        let err = rel_diff(lim, -PRESSURE_REFERENCE);
        Ok(CriterionOutcome::new(2, title, err <= 1e-6, format!("extrapolated {lim:.12} rel {err:.2e}")))
    })
}

/// `(sigma_bar, ratio, rapidity)` at `a = 1` for the oracle comparison.
pub const ORACLE_POINTS: [(f64, f64, f64); 6] = [
    (0.2, 0.0, 0.0),
    (0.2, 0.5, 0.3),
    (0.2, 0.0, 0.3),
    (0.5, 0.0, 0.0),
    (0.5, 0.5, 0.0),
    (0.5, 0.5, 0.3),
];

pub fn criterion_3(profile: Profile) -> CriterionOutcome {
    let title = "oracle equivalence";
    if !profile.oracle() {
        return CriterionOutcome::skipped(3, title, "oracle quadrature skipped in the fast profile");
    }
    run(3, title, || {
        let g = geom(1.0)?;
        let spec = OracleSpec::default();
        let mut worst = 0.0f64;
        for &(sb, r, eta) in &ORACLE_POINTS {
            let c = boosted(sb, r, eta, DIAGONAL)?;
            let o = stress_oracle(&g, &c, &spec)?;
            worst = worst.max(o.tensor.max_rel_deviation(&stress_closed(&g, &c, false)?));
        }
        Ok(CriterionOutcome::new(3, title, worst <= 1e-5, format!("max rel dev {worst:.2e} over 6 points")))
    })
}

pub fn criterion_4() -> CriterionOutcome {
    let title = "derivative cross-check";
    run(4, title, || {
        let (g, c) = (geom(1.0)?, rest(0.5, 0.0)?);
        let dev = stress_fd(&g, &c, 1e-4)?.max_rel_deviation(&stress_closed(&g, &c, false)?);
        Ok(CriterionOutcome::new(4, title, dev <= 1e-6, format!("max rel dev {dev:.2e}")))
    })
}

fn trace_ok(t: &StressTensor, allowance: f64) -> bool {
    t.is_symmetric() && t.trace().abs() <= 1e-10 * t.max_abs() + allowance
}

/// Random valid configuration: `a` in [0.5, 2], `sb / a` in `sb_range`,
/// ratio in `[0, r_max)`, rapidity in [0, 1), random in-plane direction.
fn random_config(rng: &mut ChaCha8Rng, sb_range: (f64, f64), r_max: f64) -> Result<(PlateGeometry, CutoffConfig)> {
    let a = rng.gen_range(0.5..2.0);
    let sb = a * rng.gen_range(sb_range.0..sb_range.1);
    let r = rng.gen_range(0.0..r_max);
    let eta = rng.gen_range(0.0..1.0);
    let theta: f64 = rng.gen_range(0.0..2.0 * PI);
    let c = boosted(sb, r, eta, [theta.cos(), theta.sin()])?;
    Ok((geom(a)?, c))
}

pub fn criterion_5(profile: Profile) -> CriterionOutcome {
    let title = "tracelessness and symmetry";
    run(5, title, || {
        let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
        let mut bad = Vec::new();
        for i in 0..100 {
            let (g, c) = random_config(&mut rng, (0.005, 1.0), 0.95)?;
            for (name, t) in [
                ("closed", stress_closed(&g, &c, false)?),
                ("closed subtracted", stress_closed(&g, &c, true)?),
                ("printed", stress_printed_full(&g, &c)?),
                ("printed subtracted", stress_printed_subtracted(&g, &c)?),
            ] {
                if !trace_ok(&t, 0.0) {
                    bad.push(format!("{name} #{i}"));
                }
            }
        }
        let mut detail = String::from("100 configs, closed and printed");
        if profile.oracle() {
            let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED ^ 1);
            let spec = OracleSpec::default();
            for i in 0..100 {
                let (g, c) = random_config(&mut rng, (0.2, 1.0), 0.6)?;
                let o = stress_oracle(&g, &c, &spec)?;
                // the trace may be off by the summed error of its four terms
                let allowance: f64 = (0..4).map(|m| o.abs_error.get(m, m)).sum();
                if !trace_ok(&o.tensor, allowance) {
                    bad.push(format!("oracle #{i}"));
                }
            }
            detail.push_str(", oracle");
        } else {
            detail.push_str(" (oracle skipped)");
        }
        let pass = bad.is_empty();
        if !pass {
            detail.push_str(&format!("; violations: {}", bad.join(", ")));
        }
        Ok(CriterionOutcome::new(5, title, pass, detail))
    })
}

pub fn criterion_6(profile: Profile) -> CriterionOutcome {
    let title = "boost covariance";
    run(6, title, || {
        let g = geom(1.0)?;
        let b = Boost::new(0.3, DIAGONAL)?;
        let mut worst_closed = 0.0f64;
        let mut worst_oracle = 0.0f64;
        for &(sb, r) in &[(0.5, 0.2), (0.3, 0.0), (0.05, 0.5)] {
            let c = rest(sb, r)?;
            let cb = c.boosted(&b)?;
            for subtract in [false, true] {
                let lhs = stress_closed(&g, &c, subtract)?.transformed(&b);
                worst_closed = worst_closed.max(lhs.max_rel_deviation(&stress_closed(&g, &cb, subtract)?));
            }
            if profile.oracle() && sb >= 0.2 {
                let spec = OracleSpec::default();
                let lhs = stress_oracle(&g, &c, &spec)?.tensor.transformed(&b);
                worst_oracle = worst_oracle.max(lhs.max_rel_deviation(&stress_oracle(&g, &cb, &spec)?.tensor));
            }
        }
        let pass = worst_closed <= 1e-8 && worst_oracle <= 1e-5;
        let oracle = if profile.oracle() { format!("{worst_oracle:.2e}") } else { "skipped".into() };
        Ok(CriterionOutcome::new(6, title, pass, format!("closed {worst_closed:.2e}, oracle {oracle}")))
    })
}

pub const RESIDUAL_SIGMAS: [f64; 3] = [0.04, 0.02, 0.01];

pub fn criterion_7() -> CriterionOutcome {
    let title = "pressure/energy relation";
    run(7, title, || {
        let g = geom(1.0)?;
        let da = default_da(&g);
        let zero = pressure_energy_residual(&g, &rest(0.005, 0.0)?, da)?;
        let fixed_r = RESIDUAL_SIGMAS
            .iter()
            .map(|&sb| Ok((sb, pressure_energy_residual(&g, &rest(sb, 0.5)?, da)?.abs())))
            .collect::<Result<Vec<_>>>()?;
        let slope = loglog_slope(&fixed_r)?;
        // companion reading: Sigma held at 0.005 instead of the ratio
        let fixed_s = RESIDUAL_SIGMAS
            .iter()
            .map(|&sb| Ok((sb, pressure_energy_residual(&g, &rest(sb, 0.005 / sb)?, da)?.abs())))
            .collect::<Result<Vec<_>>>()?;
        let slope_s = loglog_slope(&fixed_s)?;
        let nonzero = fixed_r.iter().all(|p| p.1 > 1e-3);
        let pass = zero.abs() <= 5e-6 && nonzero && (slope + 3.0).abs() <= 0.1;
        let mut out = CriterionOutcome::new(
            7,
            title,
            pass,
            format!("residual at Sigma=0 {zero:.2e}; slope at r=0.5 {slope:.4} (target -3 +- 0.1); slope at fixed Sigma {slope_s:.4}"),
        );
        out.findings.push(DiscrepancyReport::slope("residual slope at fixed r=0.5", slope, -3.0, 0.1));
        out.findings.push(DiscrepancyReport::slope("residual slope at fixed Sigma=0.005", slope_s, -3.0, 0.1));
        Ok(out)
    })
}

pub fn criterion_8() -> CriterionOutcome {
    let title = "cutoff-free tensor consistency";
    run(8, title, || {
        let g = geom(1.0)?;
        let bm = brown_maclay_tensor(&g);
        let mut parts = Vec::new();
        let mut worst = 0.0f64;
        for sb in [1e-2, 1e-3, 1e-4] {
            let c = rest(sb, 0.0)?;
            let dev = stress_printed_subtracted(&g, &c)?.max_rel_deviation(&bm);
            worst = worst.max(dev);
            parts.push(format!("sb={sb:e}: {dev:.2e}"));
        }
        let c = rest(1e-4, 0.0)?;
        let coeffs = printed_subtracted_coefficients(&g, &c)?;
        let s2 = rel_diff(coeffs.beta, PI * PI / 180.0);
        let t33 = rel_diff(stress_printed_subtracted(&g, &c)?.get(3, 3), bm.get(3, 3));
        let mut out = CriterionOutcome::new(
            8,
            title,
            worst <= 1e-10,
            format!("componentwise rel dev {} (tolerance 1e-10)", parts.join(", ")),
        );
        out.findings.push(
            DiscrepancyReport::compare("g/4 - zz coefficient, Sigma=0", coeffs.beta, PI * PI / 180.0, Thresholds::new(1e-10))
                .with_note(format!("rel {s2:.1e}")),
        );
        out.findings.push(
            DiscrepancyReport::compare("T33, Sigma=0", stress_printed_subtracted(&g, &c)?.get(3, 3), bm.get(3, 3), Thresholds::new(1e-10))
                .with_note(format!("rel {t33:.1e}")),
        );
        out.findings.push(
            DiscrepancyReport::compare("g + 3 ss/sb^2 - zz coefficient vs 0", coeffs.alpha, 0.0, Thresholds::new(1e-10))
                .with_note("equals 1/(4 pi a sb^3), grows without bound as sb -> 0"),
        );
        Ok(out)
    })
}

pub fn criterion_9() -> CriterionOutcome {
    let title = "sphere integral vs closed form";
    run(9, title, || {
        let mut worst = 0.0f64;
        for &a in &[1.0, 2.0] {
            for &sigma in &[0.05, 0.1] {
                for &r in &[0.1, 0.5, 1.0, 2.0, 10.0] {
                    let c = SphereConfig::new(a, sigma, r * sigma)?;
                    worst = worst.max(rel_diff(delta_e_integral(&c)?.value, delta_e_closed_derived(&c)));
                }
            }
        }
        Ok(CriterionOutcome::new(9, title, worst <= 1e-8, format!("max rel dev {worst:.2e} over 20 points")))
    })
}

pub fn criterion_10() -> CriterionOutcome {
    let title = "sphere printed closed form";
    run(10, title, || {
        let c = SphereConfig::new(1.0, 0.1, 0.1)?;
        let integral = delta_e_integral(&c)?.value;
        let printed = delta_e_closed_printed(&c);
        let ratio = printed / integral;
        let dev = rel_diff(ratio, 1.0 / c.sigma());
        let mut out = CriterionOutcome::new(
            10,
            title,
            dev <= 1e-6,
            format!("printed {printed:.10} vs integral {integral:.10}, ratio {ratio:.9} (1/sigma)"),
        );
        out.findings.push(
            DiscrepancyReport::compare("sphere printed closed form vs integral", printed, integral, Thresholds::default())
                .with_note(format!("differ by 1/sigma = {}", 1.0 / c.sigma())),
        );
        Ok(out)
    })
}

pub fn criterion_11(profile: Profile) -> CriterionOutcome {
    let title = "vanishing at Sigma = 0";
    run(11, title, || {
        let c = SphereConfig::new(1.0, 0.1, 0.0)?;
        let mut values = vec![
            ("integral", delta_e_integral(&c)?.value),
            ("closed printed", delta_e_closed_printed(&c)),
            ("closed derived", delta_e_closed_derived(&c)),
        ];
        if profile != Profile::Fast {
            values.push(("direct", delta_e_direct(&c)?.value));
        }
        let pass = values.iter().all(|(_, v)| *v == 0.0);
        let detail = values.iter().map(|(n, v)| format!("{n} {v}")).collect::<Vec<_>>().join(", ");
        Ok(CriterionOutcome::new(11, title, pass, detail))
    })
}

pub const DIRECT_SIGMAS: [f64; 3] = [0.04, 0.02, 0.01];

pub fn criterion_12(profile: Profile) -> CriterionOutcome {
    let title = "direct vs integral sphere shift";
    if profile == Profile::Fast {
        return CriterionOutcome::skipped(12, title, "direct series skipped in the fast profile");
    }
    run(12, title, || {
        let mut devs = Vec::new();
        for &sigma in &DIRECT_SIGMAS {
            let c = SphereConfig::new(1.0, sigma, sigma)?;
            let d = delta_e_direct(&c)?.value;
            devs.push((d / delta_e_integral(&c)?.value - 1.0).abs());
        }
        let shrinking = devs.windows(2).all(|w| w[1] < w[0]);
        let last = *devs.last().expect("three sigmas");
        let detail = format!(
            "rel dev {} across sigma {:?}",
            devs.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(", "),
            DIRECT_SIGMAS
        );
        Ok(CriterionOutcome::new(12, title, shrinking && last <= 0.05, detail))
    })
}

pub fn criterion_13() -> CriterionOutcome {
    let title = "contour-angle independence";
    run(13, title, || {
        let base = SphereConfig::new(1.0, 0.2, 0.0)?;
        let vals = [0.4, 0.8, 1.2]
            .iter()
            .map(|&phi| Ok(e_sigma(&base.with_phi(phi)?, false)?.value))
            .collect::<Result<Vec<_>>>()?;
        let worst = vals.iter().map(|v| rel_diff(*v, vals[0])).fold(0.0, f64::max);
        Ok(CriterionOutcome::new(13, title, worst <= 1e-4, format!("E_sigma {:.12}, max rel spread {worst:.2e}", vals[0])))
    })
}

pub fn criterion_14() -> CriterionOutcome {
    let title = "eigenmode boundary checks";
    run(14, title, || {
        let g = geom(1.0)?;
        let mut worst = 0.0f64;
        for n in [1, 2] {
            for lambda in [1, 2] {
                for k in [[1.0, 0.0], [0.7, 0.3]] {
                    worst = worst.max(eigenmode_check(n, lambda, k, &g, 2001)?);
                }
            }
        }
        let detuned = eigenmode_check_detuned(1, 1, [1.0, 0.0], &g, 2001, 1.1)?;
        let pass = worst <= 1e-6 && detuned >= 0.1;
        Ok(CriterionOutcome::new(14, title, pass, format!("max violation {worst:.2e}, detuned control {detuned:.3}")))
    })
}

/// Renders a fixed adjudication and a fixed sweep twice each and compares
/// the bytes.
pub fn criterion_15() -> CriterionOutcome {
    let title = "determinism";
    run(15, title, || {
        let render = || -> Result<Vec<u8>> {
            let g = geom(1.0)?;
            let grid = [rest(0.01, 0.0)?, rest(0.01, 0.5)?, boosted(0.05, 0.25, 0.3, DIAGONAL)?];
            let mut out = Vec::new();
            for r in adjudicate(&g, &grid, &AdjudicateOptions::default())? {
                out.extend_from_slice(format!("{r}\n").as_bytes());
            }
            let spec = crate::cli::sweep::SweepSpec::example_pressure();
            crate::cli::sweep::run_sweep(&spec, &mut out, crate::cli::sweep::Format::Csv)?;
            Ok(out)
        };
        let first = render()?;
        let second = render()?;
        let same = first == second;
        Ok(CriterionOutcome::new(15, title, same, format!("{} bytes, identical: {same}", first.len())))
    })
}

/// Runs the whole matrix in criterion order.
pub fn verify_all(profile: Profile) -> Vec<CriterionOutcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(profile),
        criterion_4(),
        criterion_5(profile),
        criterion_6(profile),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(profile),
        criterion_12(profile),
        criterion_13(),
        criterion_14(),
        criterion_15(),
    ]
}

pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    outcomes.iter().all(CriterionOutcome::passed)
}
