//! Cutoff-dependent part of the Casimir energy of a conducting sphere.
//!
//! With `nu = l + 1/2` the regularized divergent part is
//!
//! ```text
//! E_sigma = (1 / 4 pi a) sum_{l >= 1} Re e^{-i phi} int_0^inf dy
//!           exp(-i nu sigma y e^{-i phi}) y d/dy (1 + y^2 e^{-2 i phi})^-3
//! ```
//!
//! on a ray rotated by `phi` into the lower half plane, optionally weighted
//! by a secondary cutoff `exp(-Sigma nu)`. The shift `Delta E` caused by the
//! secondary cutoff is computed by direct difference of the two series, by
//! its one-dimensional integral representation, and by two closed forms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_semi_infinite, integrate_semi_infinite_vec, loglog_slope, CompensatedSum, QuadOptions,
    QuadratureResult,
};
use crate::report::{DiscrepancyReport, Thresholds};

/// First angular momentum in the sum.
pub const L_START: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereConfig {
    a: f64,
    sigma: f64,
    scalar: f64,
    phi: f64,
    l_max: usize,
    tol: f64,
}

impl SphereConfig {
    pub const DEFAULT_PHI: f64 = 0.8;
    pub const DEFAULT_L_MAX: usize = 1_000_000;
    pub const DEFAULT_TOL: f64 = 1e-10;

    /// Radius `a`, primary cutoff `sigma`, secondary cutoff `Sigma`, with
    /// the default contour angle, cap and tolerance.
    pub fn new(a: f64, sigma: f64, scalar: f64) -> Result<Self> {
        Self::with_all(a, sigma, scalar, Self::DEFAULT_PHI, Self::DEFAULT_L_MAX, Self::DEFAULT_TOL)
    }

    pub fn with_all(a: f64, sigma: f64, scalar: f64, phi: f64, l_max: usize, tol: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidGeometry(format!("sphere radius must be positive and finite, got {a}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive and finite, got {sigma}")));
        }
        if !(scalar >= 0.0 && scalar.is_finite()) {
            return Err(Error::NegativeSigma(scalar));
        }
        if !(phi > 0.0 && phi < 0.5 * PI) {
            return Err(Error::InvalidConfig(format!("contour angle must lie in (0, pi/2), got {phi}")));
        }
        if l_max < L_START {
            return Err(Error::InvalidConfig(format!("l_max must be at least {L_START}")));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { a, sigma, scalar, phi, l_max, tol })
    }

    pub fn radius(&self) -> f64 {
        self.a
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The secondary cutoff `Sigma`.
    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `r = Sigma / sigma`.
    pub fn ratio(&self) -> f64 {
        self.scalar / self.sigma
    }

    pub fn with_phi(self, phi: f64) -> Result<Self> {
        Self::with_all(self.a, self.sigma, self.scalar, phi, self.l_max, self.tol)
    }

    pub fn with_scalar(self, scalar: f64) -> Result<Self> {
        Self::with_all(self.a, self.sigma, scalar, self.phi, self.l_max, self.tol)
    }

    pub fn with_l_max(self, l_max: usize) -> Result<Self> {
        Self::with_all(self.a, self.sigma, self.scalar, self.phi, l_max, self.tol)
    }

    pub fn with_tol(self, tol: f64) -> Result<Self> {
        Self::with_all(self.a, self.sigma, self.scalar, self.phi, self.l_max, tol)
    }
}

fn nu(l: usize) -> f64 {
    l as f64 + 0.5
}

/// Upper bound on `|term(nu)|` (before the `1 / 4 pi a` prefactor) times
/// the secondary weight; the per-l integral is `pi/16 (w^3 - 3w - 3) e^-w`
/// with `w = nu sigma`, so `(pi/16)(w^3 + 3w + 3) e^{-(sigma + Sigma) nu}`
/// dominates it.
fn term_bound(sigma: f64, scalar: f64, nu: f64) -> f64 {
    let w = nu * sigma;
    PI / 16.0 * (w * w * w + 3.0 * w + 3.0) * (-(sigma + scalar) * nu).exp()
}

/// Bound on `sum_{l > last} |weighted term|`. The ratio of consecutive
/// bounds decreases with `nu`, so the tail is below a geometric series.
fn tail_bound(sigma: f64, scalar: f64, last: usize) -> f64 {
    let b1 = term_bound(sigma, scalar, nu(last + 1));
    let b2 = term_bound(sigma, scalar, nu(last + 2));
    let q = b2 / b1;
    if !(q < 1.0) {
        return f64::INFINITY;
    }
    b1 / (1.0 - q)
}

/// Number of the last `l` needed so the truncated tail contributes at most
/// `budget` to the energy.
fn truncation(cfg: &SphereConfig, scalar: f64, budget: f64) -> Result<usize> {
    let scale = 4.0 * PI * cfg.a;
    let ok = |l: usize| tail_bound(cfg.sigma, scalar, l) / scale <= budget;
    // exponential search, then bisection
    let mut hi = L_START;
    while !ok(hi) {
        if hi >= cfg.l_max {
            let mut needed = hi;
            while !ok(needed) && needed < usize::MAX / 4 {
                needed *= 2;
            }
            return Err(Error::TailTooFat { needed, cap: cfg.l_max });
        }
        hi = (hi * 2).min(cfg.l_max);
    }
    let mut lo = L_START;
    if ok(lo) {
        return Ok(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `Re e^{-i phi} int_0^inf exp(-i w y e^{-i phi}) (-6 y^2 u)(1 + y^2 u)^-4 dy`
/// with `u = e^{-2 i phi}`, real and imaginary parts integrated together.
pub fn rotated_term(w: f64, phi: f64, abs_tol: f64) -> QuadratureResult {
    let rot = Complex64::from_polar(1.0, -phi);
    let u = rot * rot;
    let iw = Complex64::new(0.0, -w) * rot;
    let hint = 1.0 / (1.0 + w * phi.sin());
    let opts = QuadOptions::new(abs_tol).with_abs(abs_tol);
    let r = integrate_semi_infinite_vec(
        |y| {
            let y2u = u * (y * y);
            let one = Complex64::new(1.0, 0.0) + y2u;
            let one2 = one * one;
            let v = (iw * y).exp() * (-6.0 * y2u) / (one2 * one2);
            [v.re, v.im]
        },
        hint,
        &opts,
    );
    let value = (rot * Complex64::new(r.value[0], r.value[1])).re;
    QuadratureResult {
        value,
        abs_error_estimate: r.abs_error_estimate[0].hypot(r.abs_error_estimate[1]),
        evaluations: r.evaluations,
        converged: r.converged,
    }
}

struct Terms {
    values: Vec<f64>,
    error: f64,
    evaluations: usize,
}

fn terms(cfg: &SphereConfig, last: usize, term_tol: f64) -> Result<Terms> {
    let results: Vec<QuadratureResult> = (L_START..=last)
        .into_par_iter()
        .map(|l| rotated_term(nu(l) * cfg.sigma, cfg.phi, term_tol))
        .collect();
    if let Some(bad) = results.iter().find(|r| !r.converged) {
        return Err(Error::NoConvergence {
            value: bad.value,
            abs_error: bad.abs_error_estimate,
            evaluations: bad.evaluations,
        });
    }
    Ok(Terms {
        values: results.iter().map(|r| r.value).collect(),
        error: results.iter().map(|r| r.abs_error_estimate).sum(),
        evaluations: results.iter().map(|r| r.evaluations).sum(),
    })
}

fn weighted_sum(values: &[f64], scalar: f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v * (-scalar * nu(L_START + i)).exp())
        .collect::<CompensatedSum>()
        .value()
}

/// Per-term tolerance so that the summed quadrature error stays within half
/// of `tol` after the prefactor.
fn term_tolerance(cfg: &SphereConfig, count: usize) -> f64 {
    0.5 * cfg.tol * 4.0 * PI * cfg.a / count as f64
}

/// `E_sigma`, with or without the secondary cutoff.
pub fn e_sigma(cfg: &SphereConfig, with_secondary: bool) -> Result<QuadratureResult> {
    let scalar = if with_secondary { cfg.scalar } else { 0.0 };
    let last = truncation(cfg, scalar, 0.1 * cfg.tol)?;
    let count = last - L_START + 1;
    let t = terms(cfg, last, term_tolerance(cfg, count))?;
    let pref = 1.0 / (4.0 * PI * cfg.a);
    let tail = tail_bound(cfg.sigma, scalar, last) * pref;
    Ok(QuadratureResult {
        value: pref * weighted_sum(&t.values, scalar),
        abs_error_estimate: pref * t.error + tail,
        evaluations: t.evaluations,
        converged: true,
    })
}

/// `E_sigma(with secondary) - E_sigma(without)`, both sums built from the
/// same per-l integrals so that `Sigma = 0` gives exactly zero.
pub fn delta_e_direct(cfg: &SphereConfig) -> Result<QuadratureResult> {
    // the unweighted series is the slower one to converge
    let last = truncation(cfg, 0.0, 0.1 * cfg.tol)?;
    let count = last - L_START + 1;
    let t = terms(cfg, last, term_tolerance(cfg, count))?;
    let pref = 1.0 / (4.0 * PI * cfg.a);
    let with = weighted_sum(&t.values, cfg.scalar);
    let without = weighted_sum(&t.values, 0.0);
    let tail = (tail_bound(cfg.sigma, 0.0, last) + tail_bound(cfg.sigma, cfg.scalar, last)) * pref;
    Ok(QuadratureResult {
        value: pref * (with - without),
        abs_error_estimate: 2.0 * pref * t.error + tail,
        evaluations: t.evaluations,
        converged: true,
    })
}

/// `int_0^inf y^2 / ((1 + y^2)^4 (y^2 + r^2)) dy`.
pub fn i_of_r(r: f64, tol: f64) -> Result<QuadratureResult> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::DegenerateInput(format!("r must be non-negative and finite, got {r}")));
    }
    let r2 = r * r;
    let f = |y: f64| {
        let y2 = y * y;
        let frac = if r2 == 0.0 { 1.0 } else { y2 / (y2 + r2) };
        frac / (1.0 + y2).powi(4)
    };
    let mut res = integrate_semi_infinite(f, tol, 1.0)?;
    // tol is relative here: the integral shrinks like r^-2
    if res.abs_error_estimate > tol * res.value.abs().max(f64::MIN_POSITIVE) {
        let opts = QuadOptions::new(tol).with_abs(0.0);
        res = crate::numerics::integrate_semi_infinite_with(f, 1.0, &opts).into_result()?;
    }
    Ok(res)
}

/// Default relative tolerance of [`i_of_r`] inside the energy shift.
pub const I_OF_R_TOL: f64 = 1e-13;

/// `-(3 Sigma / (2 pi a sigma^2)) I(Sigma / sigma)`.
pub fn delta_e_integral(cfg: &SphereConfig) -> Result<QuadratureResult> {
    let pref = -3.0 * cfg.scalar / (2.0 * PI * cfg.a * cfg.sigma * cfg.sigma);
    let i = i_of_r(cfg.ratio(), I_OF_R_TOL)?;
    Ok(QuadratureResult {
        value: pref * i.value,
        abs_error_estimate: pref.abs() * i.abs_error_estimate,
        evaluations: i.evaluations,
        converged: i.converged,
    })
}

/// Closed form as printed:
/// `-(3 / 64 a sigma) Sigma (Sigma^2 + 4 sigma Sigma + 5 sigma^2) / (Sigma + sigma)^4`.
pub fn delta_e_closed_printed(cfg: &SphereConfig) -> f64 {
    let (s, b) = (cfg.sigma, cfg.scalar);
    -(3.0 / (64.0 * cfg.a * s)) * b * (b * b + 4.0 * s * b + 5.0 * s * s) / (b + s).powi(4)
}

/// Closed form of the integral representation, from
/// `I(r) = (pi/32)(5 + 4r + r^2) / (1 + r)^4`.
pub fn delta_e_closed_derived(cfg: &SphereConfig) -> f64 {
    let (s, b) = (cfg.sigma, cfg.scalar);
    -3.0 * b * (b * b + 4.0 * s * b + 5.0 * s * s) / (64.0 * cfg.a * (b + s).powi(4))
}

/// Options for [`sphere_report`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SphereReportOptions {
    pub thresholds: Thresholds,
    /// Include the direct series difference (the expensive column).
    pub direct: bool,
}

fn describe(cfg: &SphereConfig) -> String {
    format!("a={} sigma={} Sigma={} phi={}", cfg.a, cfg.sigma, cfg.scalar, cfg.phi)
}

type ScalingGroup = (f64, f64, Vec<(f64, f64)>);

/// Points `(sigma, |f|)` of the `Sigma > 0` configurations, grouped by
/// radius and by the value of `key`; groups with fewer than two distinct
/// `sigma` are dropped. Order follows first appearance in the grid.
fn scaling_groups(
    grid: &[SphereConfig],
    key: fn(&SphereConfig) -> f64,
    f: &dyn Fn(&SphereConfig) -> Result<f64>,
) -> Result<Vec<ScalingGroup>> {
    let same = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
    let mut groups: Vec<ScalingGroup> = Vec::new();
    for cfg in grid.iter().filter(|c| c.scalar > 0.0) {
        let k = key(cfg);
        let v = f(cfg)?.abs();
        match groups.iter_mut().find(|(a, g, _)| *a == cfg.a && same(*g, k)) {
            Some((_, _, pts)) => pts.push((cfg.sigma, v)),
            None => groups.push((cfg.a, k, vec![(cfg.sigma, v)])),
        }
    }
    groups.retain(|(_, _, pts)| {
        let mut s: Vec<f64> = pts.iter().map(|p| p.0).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s.len() >= 2
    });
    Ok(groups)
}

/// Compares the energy-shift representations on every grid point and fits
/// `sigma` scaling exponents at fixed `r` and at fixed `Sigma`.
pub fn sphere_report(grid: &[SphereConfig], opts: &SphereReportOptions) -> Result<Vec<DiscrepancyReport>> {
    let t = opts.thresholds;
    let mut out = Vec::new();
    for cfg in grid {
        let tag = describe(cfg);
        let integral = delta_e_integral(cfg)?.value;
        let derived = delta_e_closed_derived(cfg);
        let printed = delta_e_closed_printed(cfg);
        out.push(DiscrepancyReport::compare(format!("delta_e integral vs closed derived [{tag}]"), integral, derived, t));
        let mut r = DiscrepancyReport::compare(format!("delta_e integral vs closed printed [{tag}]"), integral, printed, t);
        if integral != 0.0 {
            r = r.with_note(format!("printed/integral = {:.9} (1/sigma = {:.9})", printed / integral, 1.0 / cfg.sigma));
        }
        out.push(r);
        if opts.direct {
            let direct = delta_e_direct(cfg)?;
            out.push(
                DiscrepancyReport::compare(format!("delta_e direct vs integral [{tag}]"), direct.value, integral, t)
                    .with_note(format!("l from {L_START}, direct error {:.1e}", direct.abs_error_estimate)),
            );
        }
    }

    let integral_of = |c: &SphereConfig| delta_e_integral(c).map(|q| q.value);
    let printed_of = |c: &SphereConfig| Ok(delta_e_closed_printed(c));
    for (a, r, pts) in scaling_groups(grid, SphereConfig::ratio, &integral_of)? {
        let slope = loglog_slope(&pts)?;
        out.push(DiscrepancyReport::slope(format!("delta_e integral slope at fixed r={r} a={a}"), slope, -1.0, 0.1));
    }
    let printed = scaling_groups(grid, SphereConfig::scalar, &printed_of)?;
    for ((a, scalar, pts), (_, _, printed_pts)) in scaling_groups(grid, SphereConfig::scalar, &integral_of)?.into_iter().zip(printed) {
        let slope = loglog_slope(&pts)?;
        let printed_slope = loglog_slope(&printed_pts)?;
        out.push(
            DiscrepancyReport::slope(
                format!("delta_e slope at fixed Sigma={scalar} a={a}: integral vs printed"),
                slope,
                printed_slope,
                0.1,
            )
            .with_note(format!("integral limit -3/(64 a Sigma) = {:.6}", -3.0 / (64.0 * a * scalar))),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Residue evaluation of the rotated per-l integral: the contour can be
    /// closed around the fourth-order pole at `y = -i`.
    fn residue_term(w: f64) -> f64 {
        PI / 16.0 * (w * w * w - 3.0 * w - 3.0) * (-w).exp()
    }

    fn residue_e_sigma(cfg: &SphereConfig, scalar: f64) -> f64 {
        let mut s = CompensatedSum::new();
        for l in L_START..2_000_000 {
            let v = residue_term(nu(l) * cfg.sigma) * (-scalar * nu(l)).exp();
            s.add(v);
            if l > 10 && v.abs() < 1e-30 {
                break;
            }
        }
        s.value() / (4.0 * PI * cfg.a)
    }

    fn cfg(a: f64, sigma: f64, scalar: f64) -> SphereConfig {
        SphereConfig::new(a, sigma, scalar).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SphereConfig::new(0.0, 0.1, 0.0).is_err());
        assert!(SphereConfig::new(1.0, 0.0, 0.0).is_err());
        assert!(SphereConfig::new(1.0, 0.1, -0.1).is_err());
        assert!(cfg(1.0, 0.1, 0.0).with_phi(PI / 2.0).is_err());
        assert!(cfg(1.0, 0.1, 0.0).with_phi(0.0).is_err());
        assert!(cfg(1.0, 0.1, 0.0).with_l_max(0).is_err());
    }

    #[test]
    fn rotated_term_matches_residue() {
        for &w in &[0.01, 0.3, 1.0, 4.0, 20.0] {
            for &phi in &[0.3, 0.8, 1.2] {
                let r = rotated_term(w, phi, 1e-13);
                assert!(r.converged);
                assert!((r.value - residue_term(w)).abs() < 1e-11, "w={w} phi={phi}: {} vs {}", r.value, residue_term(w));
            }
        }
    }

    #[test]
    fn e_sigma_pinned_values() {
        for &(sigma, pinned) in &[(0.2, 0.046_641_548_939_896_25), (0.1, 0.046_816_465_607_194_24)] {
            let c = cfg(1.0, sigma, 0.0);
            let e = e_sigma(&c, false).unwrap();
            assert!((e.value - pinned).abs() < 1e-9, "{sigma}: {}", e.value);
            assert!((e.value - residue_e_sigma(&c, 0.0)).abs() <= e.abs_error_estimate.max(1e-12));
        }
    }

    #[test]
    fn e_sigma_is_contour_independent() {
        let base = cfg(1.0, 0.2, 0.0);
        let vals: Vec<f64> = [0.3, 0.6, 0.9, 1.2].iter().map(|&p| e_sigma(&base.with_phi(p).unwrap(), false).unwrap().value).collect();
        for v in &vals {
            assert!((v - vals[0]).abs() <= 10.0 * base.tol(), "{vals:?}");
        }
    }

    #[test]
    fn e_sigma_grows_as_cutoff_shrinks() {
        let e2 = e_sigma(&cfg(1.0, 0.2, 0.0), false).unwrap().value;
        let e1 = e_sigma(&cfg(1.0, 0.1, 0.0), false).unwrap().value;
        assert!(e1.abs() > e2.abs());
    }

    #[test]
    fn huge_secondary_cutoff_kills_everything() {
        let e = e_sigma(&cfg(1.0, 0.2, 200.0), true).unwrap();
        assert!(e.value.abs() < 1e-10);
    }

    #[test]
    fn secondary_weight_matches_residue_sum() {
        let c = cfg(1.0, 0.1, 0.05);
        let e = e_sigma(&c, true).unwrap();
        assert!((e.value - residue_e_sigma(&c, 0.05)).abs() < 1e-9);
    }

    #[test]
    fn l_max_cap() {
        let c = cfg(1.0, 0.01, 0.0).with_l_max(50).unwrap();
        assert!(matches!(e_sigma(&c, false), Err(Error::TailTooFat { cap: 50, .. })));
    }

    #[test]
    fn direct_difference_basics() {
        assert_eq!(delta_e_direct(&cfg(1.0, 0.2, 0.0)).unwrap().value, 0.0);
        let c = cfg(1.0, 0.1, 0.1);
        let d = delta_e_direct(&c).unwrap().value;
        assert!(d < 0.0);
        let oracle = residue_e_sigma(&c, 0.1) - residue_e_sigma(&c, 0.0);
        assert!((d - oracle).abs() < 1e-9, "{d} {oracle}");
    }

    #[test]
    fn direct_approaches_integral() {
        let mut prev = f64::INFINITY;
        for &(sigma, pinned) in &[(0.04, -0.733_271_744_287_732), (0.02, -1.465_271_077_311_736)] {
            let c = cfg(1.0, sigma, sigma);
            let d = delta_e_direct(&c).unwrap().value;
            assert!((d / pinned - 1.0).abs() < 1e-9, "{d}");
            let dev = (d / delta_e_integral(&c).unwrap().value - 1.0).abs();
            assert!(dev < prev);
            prev = dev;
        }
    }

    /// `int_0^inf (1+y^2)^-n dy` by the reduction formula.
    fn power_integral(n: i32) -> f64 {
        let mut v = PI / 2.0;
        for k in 1..n {
            v *= (2 * k - 1) as f64 / (2 * k) as f64;
        }
        v
    }

    #[test]
    fn i_of_r_values() {
        assert!((power_integral(4) - 5.0 * PI / 32.0).abs() < 1e-15);
        let i0 = i_of_r(0.0, 1e-12).unwrap().value;
        assert!((i0 - power_integral(4)).abs() < 1e-12);
        // r = 1: y^2 (1+y^2)^-5 = (1+y^2)^-4 - (1+y^2)^-5
        let i1 = i_of_r(1.0, 1e-12).unwrap().value;
        assert!((i1 - (power_integral(4) - power_integral(5))).abs() < 1e-12);
        assert!((i1 - 5.0 * PI / 256.0).abs() < 1e-12);
        let big = i_of_r(100.0, 1e-12).unwrap().value * 1e4;
        assert!((big / (PI / 32.0) - 1.0).abs() < 1e-3);
        assert!(i_of_r(-1.0, 1e-12).is_err());
    }

    #[test]
    fn i_of_r_monotone_and_bounded() {
        let mut prev = 5.0 * PI / 32.0 + 1e-15;
        for r in [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
            let v = i_of_r(r, 1e-12).unwrap().value;
            assert!(v < prev || r == 0.0, "r={r}");
            assert!(v <= 5.0 * PI / 32.0 + 1e-15);
            prev = v;
        }
    }

    /// Partial fractions of `y^2 / ((1+y^2)^4 (y^2+r^2))` in powers of
    /// `1/(1+y^2)` and `1/(y^2+r^2)`, each integrated exactly.
    fn i_of_r_partial_fractions(r: f64) -> f64 {
        // with c = 1 - r^2: y^2/(y^2+r^2) = 1 - r^2/(y^2+r^2) and
        // 1/((1+y^2)^4 (y^2+r^2)) = sum_{j=1}^{4} c^{j-5}... expanded below
        let c = 1.0 - r * r;
        let r2 = r * r;
        // 1/((1+y^2)^4 (y^2+r^2)) = 1/(c^4 (y^2+r^2)) - sum_{j=1}^{4} 1/(c^{5-j} (1+y^2)^j)
        let mut inv = PI / (2.0 * r) / c.powi(4);
        for j in 1..=4 {
            inv -= power_integral(j) / c.powi(5 - j);
        }
        power_integral(4) - r2 * inv
    }

    #[test]
    fn i_of_r_closed_form_validated_by_partial_fractions() {
        for r in [0.1, 0.5, 2.0, 10.0, 0.3] {
            let closed = PI / 32.0 * (5.0 + 4.0 * r + r * r) / (1.0 + r).powi(4);
            let pf = i_of_r_partial_fractions(r);
            let quad = i_of_r(r, 1e-13).unwrap().value;
            assert!((closed / pf - 1.0).abs() < 1e-9, "r={r}: {closed} {pf}");
            assert!((closed / quad - 1.0).abs() < 1e-11, "r={r}: {closed} {quad}");
        }
    }

    #[test]
    fn delta_e_values() {
        let c = cfg(1.0, 0.1, 0.1);
        let integral = delta_e_integral(&c).unwrap().value;
        assert!((integral + 0.292_968_75).abs() < 1e-12);
        assert!((delta_e_closed_printed(&c) + 2.929_687_5).abs() < 1e-14);
        assert!((delta_e_closed_derived(&c) + 0.292_968_75).abs() < 1e-15);
        assert!((delta_e_closed_printed(&c) / integral - 10.0).abs() < 1e-9);
        let zero = cfg(1.0, 0.1, 0.0);
        assert_eq!(delta_e_integral(&zero).unwrap().value, 0.0);
        assert_eq!(delta_e_closed_printed(&zero), 0.0);
        assert_eq!(delta_e_closed_derived(&zero), 0.0);
    }

    #[test]
    fn delta_e_identities() {
        for &(a, sigma, scalar) in &[(1.0, 0.1, 0.01), (2.0, 0.05, 0.5), (1.5, 0.2, 0.2)] {
            let c = cfg(a, sigma, scalar);
            let i = i_of_r(scalar / sigma, I_OF_R_TOL).unwrap().value;
            let direct = -(3.0 * scalar / (2.0 * PI * a * sigma * sigma)) * i;
            assert!((delta_e_integral(&c).unwrap().value - direct).abs() <= 1e-14 * direct.abs());
            assert!((delta_e_closed_derived(&c) / delta_e_closed_printed(&c) - sigma).abs() <= 1e-14 * sigma);
            let c2 = cfg(2.0 * a, sigma, scalar);
            assert!((delta_e_integral(&c).unwrap().value / delta_e_integral(&c2).unwrap().value - 2.0).abs() < 1e-12);
            assert!((delta_e_closed_printed(&c) / delta_e_closed_printed(&c2) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_sigma_limit_is_finite() {
        let v = delta_e_integral(&cfg(1.0, 1e-4, 0.05)).unwrap().value;
        assert!((v / (-3.0 / 64.0 / 0.05) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn report_rows() {
        let grid: Vec<_> = [0.1, 0.05].iter().flat_map(|&s| [cfg(1.0, s, s), cfg(1.0, s, 0.05), cfg(1.0, s, 0.0)]).collect();
        let reps = sphere_report(&grid, &SphereReportOptions::default()).unwrap();
        let fixed_r = reps.iter().find(|r| r.label.starts_with("delta_e integral slope at fixed r=1 ")).unwrap();
        assert!((fixed_r.fitted_slope.unwrap() + 1.0).abs() < 1e-9);
        assert!(reps.iter().any(|r| r.label.starts_with("delta_e slope at fixed Sigma=0.05")));
        let zero_rows: Vec<_> = reps.iter().filter(|r| r.label.contains("Sigma=0 ")).collect();
        assert!(!zero_rows.is_empty());
        for r in zero_rows {
            assert_eq!((r.value_a, r.value_b), (0.0, 0.0));
        }
    }
}
