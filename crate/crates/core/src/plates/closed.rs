//! Exact closed pipeline.
//!
//! Every mode contributes the (2+1) kernel `exp(-sb m) / (2 pi sb)` with
//! `m = n pi / a`, weighted by `exp(Sigma m) / a`. The mode sum is geometric,
//!
//! ```text
//! F(sb, Sigma) = 1 / (2 pi a sb) * 1 / (1 - exp(-(sb - Sigma) pi / a)),
//! ```
//!
//! and the stress tensor is the covariant second-derivative operator of
//! [`tensor_from_radial`] applied to `F`. The `sb` derivatives are coded in
//! closed form. The vacuum subtraction removes the `a -> inf` limit
//! `1 / (2 pi^2 sb (sb - Sigma))` analytically via a Bernoulli series so the
//! small-cutoff regime keeps full precision.

use std::f64::consts::PI;

use super::{tensor_from_radial, PlateGeometry, RadialDerivatives, StressTensor};
use crate::error::{Error, Result};
use crate::minkowski::CutoffConfig;
use crate::numerics::CompensatedSum;

/// Smallest admissible `(sb - Sigma) pi / a`.
pub const POLE_GUARD: f64 = 1e-8;

/// `B_{2k} / (2k)!` for k = 1..13.
#[allow(clippy::excessive_precision)]
const BERNOULLI_COEFFS: [f64; 13] = [
    8.33333333333333287e-02,
    -1.38888888888888894e-03,
    3.30687830687830710e-05,
    -8.26719576719576754e-07,
    2.08767569878681002e-08,
    -5.28419013868749322e-10,
    1.33825365306846789e-11,
    -3.38968029632258272e-13,
    8.58606205627784517e-15,
    -2.17486869855806192e-16,
    5.50900282836022953e-18,
    -1.39544646858125223e-19,
    3.53470703962946728e-21,
];

// below this the subtracted kernel is summed from its Taylor series
const SERIES_CUTOFF: f64 = 1.0;

/// `Delta^m(-i sigma) = exp(-sb m) / (2 pi sb)`.
pub fn delta_m(m: f64, sigma_bar: f64) -> f64 {
    (-sigma_bar * m).exp() / (2.0 * PI * sigma_bar)
}

fn pole_argument(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<f64> {
    let x = (cfg.sigma_bar() - cfg.scalar()) * PI / geom.separation();
    if x < POLE_GUARD {
        return Err(Error::NearPole { x, min: POLE_GUARD });
    }
    Ok(x)
}

/// Closed-form `F(sb, Sigma)`.
pub fn f_exact(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<f64> {
    let x = pole_argument(geom, cfg)?;
    Ok(1.0 / (2.0 * PI * geom.separation() * cfg.sigma_bar()) / -(-x).exp_m1())
}

/// Partial sum `(1/a) sum_{n=0}^{N} exp(Sigma m_n) Delta^{m_n}`, compensated.
pub fn f_truncated(geom: &PlateGeometry, cfg: &CutoffConfig, n_max: usize) -> f64 {
    let a = geom.separation();
    let sum: CompensatedSum = (0..=n_max)
        .map(|n| {
            let m = geom.mode_mass(n);
            (cfg.scalar() * m).exp() * delta_m(m, cfg.sigma_bar())
        })
        .collect();
    sum.value() / a
}

/// The `a -> inf` limit `1 / (2 pi^2 sb (sb - Sigma))`.
pub fn f_infinity(cfg: &CutoffConfig) -> Result<f64> {
    let (sb, s) = (cfg.sigma_bar(), cfg.scalar());
    if (sb - s) / sb < POLE_GUARD {
        return Err(Error::NearPole { x: (sb - s) / sb, min: POLE_GUARD });
    }
    Ok(1.0 / (2.0 * PI * PI * sb * (sb - s)))
}

/// `g(x) = 1 / (1 - e^-x)` and its first two derivatives.
fn kernel_full(x: f64) -> [f64; 3] {
    let q = (-x).exp();
    let one_minus_q = -(-x).exp_m1();
    [
        1.0 / one_minus_q,
        -q / (one_minus_q * one_minus_q),
        q * (1.0 + q) / (one_minus_q * one_minus_q * one_minus_q),
    ]
}

/// `h(x) = g(x) - 1/x` and its first two derivatives.
fn kernel_subtracted(x: f64) -> [f64; 3] {
    if x < SERIES_CUTOFF {
        // h = 1/2 + sum_k c_k x^(2k-1)
        let x2 = x * x;
        let (mut h, mut h1, mut h2) = (0.5, 0.0, 0.0);
        let mut pow = 1.0; // x^(2k-2)
        for (i, c) in BERNOULLI_COEFFS.iter().enumerate() {
            let p = (2 * i + 1) as f64; // exponent 2k - 1
            h += c * pow * x;
            h1 += c * p * pow;
            if i > 0 {
                h2 += c * p * (p - 1.0) * pow / x;
            }
            pow *= x2;
        }
        [h, h1, h2]
    } else {
        let [g, g1, g2] = kernel_full(x);
        [g - 1.0 / x, g1 + 1.0 / (x * x), g2 - 2.0 / (x * x * x)]
    }
}

/// Radial derivatives of `F` (or of `F - F_inf` when `subtract`).
pub fn radial_exact(geom: &PlateGeometry, cfg: &CutoffConfig, subtract: bool) -> Result<RadialDerivatives> {
    let x = pole_argument(geom, cfg)?;
    let a = geom.separation();
    let sb = cfg.sigma_bar();
    let c = PI / a;
    let amp = 1.0 / (2.0 * PI * a);
    let [k0, k1, k2] = if subtract { kernel_subtracted(x) } else { kernel_full(x) };
    // F = u / sb with u(sb) = amp * kernel(c (sb - Sigma))
    let u = amp * k0;
    let u1 = amp * c * k1;
    let u2 = amp * c * c * k2;
    Ok(RadialDerivatives {
        f: u / sb,
        f1: u1 / sb - u / (sb * sb),
        f2: u2 / sb - 2.0 * u1 / (sb * sb) + 2.0 * u / (sb * sb * sb),
    })
}

/// `<T^{mu nu}>` from the exactly summed generating function.
pub fn stress_closed(geom: &PlateGeometry, cfg: &CutoffConfig, subtract: bool) -> Result<StressTensor> {
    let d = radial_exact(geom, cfg, subtract)?;
    tensor_from_radial(&d, &cfg.vector())
}

/// Normal pressure `<T-bar^{33}>` on the plates.
pub fn pressure(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<f64> {
    Ok(stress_closed(geom, cfg, true)?.get(3, 3))
}

/// Energy per unit plate area, `a <T-bar^{00}>`.
pub fn energy_density_area(geom: &PlateGeometry, cfg: &CutoffConfig) -> Result<f64> {
    Ok(geom.separation() * stress_closed(geom, cfg, true)?.get(0, 0))
}

/// Default step for the `a` derivative in [`pressure_energy_residual`].
pub fn default_da(geom: &PlateGeometry) -> f64 {
    1e-4 * geom.separation()
}

/// `T-bar^{33} + dE/da`, the derivative by central difference at fixed
/// cutoffs. Vanishes when pressure is minus the derivative of the energy
/// per area.
pub fn pressure_energy_residual(geom: &PlateGeometry, cfg: &CutoffConfig, da: f64) -> Result<f64> {
    let a = geom.separation();
    if !(da > 0.0 && da < a) {
        return Err(Error::DegenerateInput(format!("need 0 < da < a, got da = {da}")));
    }
    let plus = PlateGeometry::new(a + da)?;
    let minus = PlateGeometry::new(a - da)?;
    let de_da = (energy_density_area(&plus, cfg)? - energy_density_area(&minus, cfg)?) / (2.0 * da);
    Ok(pressure(geom, cfg)? + de_da)
}
