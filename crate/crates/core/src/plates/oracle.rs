//! Brute-force oracle for the plate stress tensor.
//!
//! Starts from the momentum-space mode sum
//!
//! ```text
//! <T^{mu nu}> = (2 pi / a) sum_n int d^3k / (2 pi)^3 delta(k^2 + m_n^2)
//!               exp(sigma_mu k^mu eps(k0)) exp(Sigma m_n) [k^mu k^nu + z^mu z^nu m_n^2]
//! ```
//!
//! resolves the delta function over `k0 = +-omega` analytically and integrates
//! the remaining `d^2k` numerically: radially by adaptive Gauss-Kronrod and
//! angularly by the periodic trapezoid rule (or analytically in the rest
//! frame). Nothing here uses the summed generating function, so agreement
//! with [`super::closed`] is a genuine check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{PlateGeometry, StressTensor};
use crate::error::{Error, Result};
use crate::minkowski::{validate_cutoff, CutoffConfig, MinkVec3, METRIC_DIAG};
use crate::numerics::{geometric_tail_n, integrate_periodic, integrate_vec_breaks, CompensatedSum, QuadOptions};

/// One transverse mode: mass `n pi / a` and on-shell frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub n: usize,
    pub mass: f64,
}

impl ModeSpectrum {
    pub fn new(geom: &PlateGeometry, n: usize) -> Self {
        Self { n, mass: geom.mode_mass(n) }
    }

    pub fn omega(&self, k: f64) -> f64 {
        k.hypot(self.mass)
    }
}

/// Which roots of `k0^2 = omega^2` enter the integrand. Only `Both` is
/// physical; `PositiveOnly` exists as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootSelection {
    Both,
    PositiveOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSpec {
    /// Highest mode index; `None` picks it from the geometric tail bound.
    pub n_max: Option<usize>,
    /// Radial cutoff in units of the damping length `1 / (sigma^0 - |sigma_vec|)`.
    pub k_max_factor: f64,
    /// Relative tolerance of every quadrature.
    pub quad_tol: f64,
    pub roots: RootSelection,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            n_max: None,
            k_max_factor: 40.0,
            quad_tol: 1e-9,
            roots: RootSelection::Both,
        }
    }
}

impl OracleSpec {
    pub fn with_tol(mut self, quad_tol: f64) -> Self {
        self.quad_tol = quad_tol;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = Some(n_max);
        self
    }

    pub fn with_roots(mut self, roots: RootSelection) -> Self {
        self.roots = roots;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.quad_tol > 0.0 && self.quad_tol < 1.0) {
            return Err(Error::InvalidConfig(format!("quad_tol must lie in (0, 1), got {}", self.quad_tol)));
        }
        if !(self.k_max_factor > 0.0 && self.k_max_factor.is_finite()) {
            return Err(Error::InvalidConfig(format!("k_max_factor must be positive, got {}", self.k_max_factor)));
        }
        Ok(())
    }
}

/// Oracle tensor with per-component error estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub tensor: StressTensor,
    pub abs_error: StressTensor,
    pub n_max: usize,
    pub evaluations: usize,
}

impl OracleOutcome {
    pub fn max_error(&self) -> f64 {
        self.abs_error.max_abs()
    }
}

// integrand slots: 00, 01, 02, 11, 12, 22, and the scalar multiplying m^2 in 33
const SLOTS: usize = 7;
const SLOT_INDEX: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
const ANGULAR_MIN_POINTS: usize = 16;

struct ModeResult {
    value: [f64; SLOTS],
    error: [f64; SLOTS],
    evaluations: usize,
    converged: bool,
}

struct Frame {
    s0: f64,
    sx: f64,
    sy: f64,
    s_norm: f64,
    sigma_bar: f64,
    scalar: f64,
    roots: RootSelection,
}

impl Frame {
    fn new(cfg: &CutoffConfig, roots: RootSelection) -> Self {
        let v = cfg.vector();
        Self {
            s0: v.t,
            sx: v.x,
            sy: v.y,
            s_norm: v.spatial_norm(),
            sigma_bar: cfg.sigma_bar(),
            scalar: cfg.scalar(),
            roots,
        }
    }

    /// Decay rate of the integrand along the worst direction.
    fn damping(&self) -> f64 {
        self.s0 - self.s_norm
    }

    /// Rigorous bound on `int_{k > K} |integrand|` for every slot, using the
    /// tangent-line bound `omega >= alpha k + beta` of the convex dispersion.
    fn tail_bound(&self, m: f64, k_cut: f64) -> f64 {
        let w = k_cut.hypot(m);
        let (alpha, beta) = if w > 0.0 { (k_cut / w, m * m / w) } else { (1.0, 0.0) };
        let gamma = self.s0 * alpha - self.s_norm;
        if gamma <= 0.0 {
            return f64::INFINITY;
        }
        let delta = self.s0 * beta - self.scalar * m;
        // |k^mu k^nu| / omega <= sqrt(2) (k + m) and the two roots add a factor 2
        let e = (-gamma * k_cut - delta).exp();
        let k2 = e * (k_cut * k_cut / gamma + 2.0 * k_cut / (gamma * gamma) + 2.0 / (gamma * gamma * gamma));
        let k1 = e * (k_cut / gamma + 1.0 / (gamma * gamma));
        std::f64::consts::SQRT_2 * 2.0 * PI * (k2 + m * k1)
    }

    /// Radial cutoff: past the boosted peak by `factor` damping lengths, then
    /// doubled until the analytic tail is negligible against `tail_tol`.
    fn radial_cutoff(&self, m: f64, factor: f64, tail_tol: f64) -> (f64, f64) {
        let peak = m * self.s_norm / self.sigma_bar;
        let len = factor / self.damping();
        let mut k_cut = peak + ((m + len).powi(2) - m * m).sqrt();
        let mut tail = self.tail_bound(m, k_cut);
        for _ in 0..30 {
            if tail <= tail_tol {
                break;
            }
            k_cut *= 2.0;
            tail = self.tail_bound(m, k_cut);
        }
        (k_cut, tail)
    }

    /// Angle-integrated slots at radius `k` (polar Jacobian included).
    fn angular(&self, m: f64, k: f64, opts: &QuadOptions) -> ([f64; SLOTS], usize) {
        let w = k.hypot(m);
        let base = -self.s0 * w + self.scalar * m;
        let rw = 1.0 / (2.0 * w);
        if self.s_norm == 0.0 {
            // rest frame: the angular average is analytic
            let e = base.exp() * rw * k;
            let e_sum = match self.roots {
                RootSelection::Both => 2.0 * e,
                RootSelection::PositiveOnly => e,
            };
            let two_pi = 2.0 * PI;
            let out = [
                two_pi * w * w * e_sum,
                0.0,
                0.0,
                PI * k * k * e_sum,
                0.0,
                PI * k * k * e_sum,
                two_pi * e_sum,
            ];
            return (out, 1);
        }
        let r = integrate_periodic(
            |theta: f64| {
                let (s, c) = theta.sin_cos();
                let (kx, ky) = (k * c, k * s);
                let proj = self.sx * kx + self.sy * ky;
                let ep = (base + proj).exp() * rw * k;
                let em = match self.roots {
                    RootSelection::Both => (base - proj).exp() * rw * k,
                    RootSelection::PositiveOnly => 0.0,
                };
                // k0 = +omega with exponent base + proj; k0 = -omega with base - proj
                let sum = ep + em;
                let diff = ep - em;
                [
                    w * w * sum,
                    w * kx * diff,
                    w * ky * diff,
                    kx * kx * sum,
                    kx * ky * sum,
                    ky * ky * sum,
                    sum,
                ]
            },
            0.0,
            2.0 * PI,
            opts,
            ANGULAR_MIN_POINTS,
        );
        (r.value, r.evaluations)
    }

    fn mode(&self, m: f64, spec: &OracleSpec, tail_tol: f64) -> ModeResult {
        let (k_cut, tail) = self.radial_cutoff(m, spec.k_max_factor, tail_tol);
        let inner_opts = QuadOptions::new(0.01 * spec.quad_tol).with_abs(0.0);
        let outer_opts = QuadOptions::new(spec.quad_tol).with_abs(0.1 * tail_tol);
        let peak = m * self.s_norm / self.sigma_bar;
        let mut breaks = vec![0.0];
        if peak > 0.0 && peak < k_cut {
            breaks.push(peak);
        }
        breaks.push(k_cut);
        let mut inner_evals = 0;
        let r = integrate_vec_breaks(
            |k| {
                let (v, e) = self.angular(m, k, &inner_opts);
                inner_evals += e;
                v
            },
            &breaks,
            &outer_opts,
        );
        let mut error = r.abs_error_estimate;
        for e in &mut error {
            *e += tail;
        }
        ModeResult {
            value: r.value,
            error,
            evaluations: inner_evals,
            converged: r.converged,
        }
    }
}

/// Default mode cutoff: the tensor terms carry polynomial prefactors in `m`,
/// so the geometric bound is taken at half the decay rate.
pub fn default_n_max(geom: &PlateGeometry, cfg: &CutoffConfig, quad_tol: f64) -> Result<usize> {
    let x = (cfg.sigma_bar() - cfg.scalar()) * PI / geom.separation();
    geometric_tail_n(0.5 * x, 1e-3 * quad_tol)
}

/// Unsubtracted `<T^{mu nu}>` by direct momentum-space quadrature.
pub fn stress_oracle(geom: &PlateGeometry, cfg: &CutoffConfig, spec: &OracleSpec) -> Result<OracleOutcome> {
    spec.validate()?;
    let n_max = match spec.n_max {
        Some(n) => n,
        None => default_n_max(geom, cfg, spec.quad_tol)?,
    };
    let frame = Frame::new(cfg, spec.roots);
    // every slot of the n = 0 mode is bounded by its K = 0 tail bound
    let scale = frame.tail_bound(0.0, 0.0);
    let tail_tol = 1e-3 * spec.quad_tol * scale;

    let modes: Vec<ModeResult> = (0..=n_max)
        .into_par_iter()
        .map(|n| frame.mode(ModeSpectrum::new(geom, n).mass, spec, tail_tol))
        .collect();

    if let Some(bad) = modes.iter().position(|r| !r.converged) {
        let r = &modes[bad];
        return Err(Error::NoConvergence {
            value: r.value[0],
            abs_error: r.error.iter().fold(0.0, |a, e| a.max(*e)),
            evaluations: r.evaluations,
        });
    }

    let c0 = 1.0 / (4.0 * PI * PI * geom.separation());
    let mut value = [0.0; SLOTS];
    let mut error = [0.0; SLOTS];
    for slot in 0..SLOTS {
        let mut s = CompensatedSum::new();
        let mut e = 0.0;
        for (n, r) in modes.iter().enumerate() {
            // the 33 slot carries m_n^2
            let w = if slot == SLOTS - 1 { geom.mode_mass(n).powi(2) } else { 1.0 };
            s.add(w * r.value[slot]);
            e += w * r.error[slot];
        }
        value[slot] = c0 * s.value();
        error[slot] = c0 * e;
    }
    let evaluations = modes.iter().map(|r| r.evaluations).sum();
    let build = |v: &[f64; SLOTS]| {
        StressTensor::from_upper(|mu, nu| match (mu, nu) {
            (3, 3) => v[SLOTS - 1],
            (_, 3) => 0.0,
            _ => {
                let idx = SLOT_INDEX.iter().position(|&p| p == (mu, nu)).expect("upper-triangle slot");
                v[idx]
            }
        })
    };
    Ok(OracleOutcome {
        tensor: build(&value),
        abs_error: build(&error),
        n_max,
        evaluations,
    })
}

/// Second-derivative operator applied numerically to an arbitrary function
/// of the three contravariant cutoff components.
///
/// `d/dsigma_mu = g^{mu mu} d/dsigma^mu`, so each time index flips the sign
/// of a component derivative; `T^{33} = -box f`.
pub fn stress_fd_of<F>(f: F, sigma: &MinkVec3, h: f64) -> Result<StressTensor>
where
    F: Fn(&MinkVec3) -> Result<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::DegenerateInput(format!("step must be positive, got {h}")));
    }
    let c = sigma.components();
    let eval = |di: usize, si: f64, dj: usize, sj: f64| -> Result<f64> {
        let mut x = c;
        x[di] += si * h;
        x[dj] += sj * h;
        f(&MinkVec3::from_components(x))
    };
    let f0 = f(sigma)?;
    let mut d2 = [[0.0; 3]; 3];
    for i in 0..3 {
        d2[i][i] = (eval(i, 1.0, i, 0.0)? - 2.0 * f0 + eval(i, -1.0, i, 0.0)?) / (h * h);
        for j in i + 1..3 {
            let v = (eval(i, 1.0, j, 1.0)? - eval(i, 1.0, j, -1.0)? - eval(i, -1.0, j, 1.0)?
                + eval(i, -1.0, j, -1.0)?)
                / (4.0 * h * h);
            d2[i][j] = v;
            d2[j][i] = v;
        }
    }
    let box_f: f64 = (0..3).map(|i| METRIC_DIAG[i] * d2[i][i]).sum();
    Ok(StressTensor::from_upper(|mu, nu| match (mu, nu) {
        (3, 3) => -box_f,
        (_, 3) => 0.0,
        (m, n) => METRIC_DIAG[m] * METRIC_DIAG[n] * d2[m][n],
    }))
}

/// Unsubtracted tensor by central differences of the summed `F` over the
/// cutoff components, at fixed `Sigma`.
pub fn stress_fd(geom: &PlateGeometry, cfg: &CutoffConfig, h: f64) -> Result<StressTensor> {
    let scalar = cfg.scalar();
    stress_fd_of(
        |s| super::closed::f_exact(geom, &validate_cutoff(*s, scalar)?),
        &cfg.vector(),
        h,
    )
}

/// Polarization of a transverse mode between the plates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Polarization {
    /// In-plane vector potential with a sine profile.
    Transverse,
    /// Cosine profile along the normal, sine profile in plane.
    Normal,
}

impl Polarization {
    pub fn from_index(lambda: u8) -> Result<Self> {
        match lambda {
            1 => Ok(Self::Transverse),
            2 => Ok(Self::Normal),
            _ => Err(Error::InvalidConfig(format!("polarization must be 1 or 2, got {lambda}"))),
        }
    }
}

/// Vector potential profile `A(z)` (x, y, z components) of mode `n`, with
/// the in-plane dependence `exp(i k.x)` factored out.
fn mode_profile(n: usize, pol: Polarization, k: [f64; 2], a: f64, z: f64) -> [Complex64; 3] {
    let m = n as f64 * PI / a;
    let kn = k[0].hypot(k[1]);
    let norm = (2.0 / a).sqrt();
    let (s, c) = (m * z).sin_cos();
    match pol {
        Polarization::Transverse => {
            let amp = norm * s / kn;
            [Complex64::new(k[1] * amp, 0.0), Complex64::new(-k[0] * amp, 0.0), Complex64::new(0.0, 0.0)]
        }
        Polarization::Normal => {
            let w = kn.hypot(m);
            let inplane = Complex64::new(0.0, -m * norm * s / (kn * w));
            [inplane * k[0], inplane * k[1], Complex64::new(kn / w * norm * c, 0.0)]
        }
    }
}

/// Largest violation of the mode equation, the wall conditions and the
/// transversality condition on a uniform grid of `z_samples` points.
pub fn eigenmode_check(n: usize, lambda: u8, k: [f64; 2], geom: &PlateGeometry, z_samples: usize) -> Result<f64> {
    eigenmode_check_detuned(n, lambda, k, geom, z_samples, 1.0)
}

/// [`eigenmode_check`] with the mass in the mode equation multiplied by
/// `detune`; anything other than 1 must produce a large violation.
pub fn eigenmode_check_detuned(
    n: usize,
    lambda: u8,
    k: [f64; 2],
    geom: &PlateGeometry,
    z_samples: usize,
    detune: f64,
) -> Result<f64> {
    let pol = Polarization::from_index(lambda)?;
    if n == 0 {
        return Err(Error::InvalidConfig("mode index must be at least 1".into()));
    }
    if !(k[0].hypot(k[1]) > 0.0) {
        return Err(Error::DegenerateInput("in-plane wave vector must be nonzero".into()));
    }
    if z_samples < 5 {
        return Err(Error::InvalidConfig("need at least 5 z samples".into()));
    }
    let a = geom.separation();
    let h = a / (z_samples - 1) as f64;
    let prof: Vec<[Complex64; 3]> = (0..z_samples).map(|j| mode_profile(n, pol, k, a, j as f64 * h)).collect();
    let m2 = (detune * n as f64 * PI / a).powi(2);
    let ik = [Complex64::new(0.0, k[0]), Complex64::new(0.0, k[1])];
    let mut worst = 0.0f64;

    for j in 2..z_samples - 2 {
        for c in 0..3 {
            // fourth-order second difference
            let d2 = (-prof[j - 2][c] + 16.0 * prof[j - 1][c] - 30.0 * prof[j][c] + 16.0 * prof[j + 1][c]
                - prof[j + 2][c])
                / (12.0 * h * h);
            worst = worst.max((d2 + m2 * prof[j][c]).norm());
        }
        let dz = (prof[j - 2][2] - 8.0 * prof[j - 1][2] + 8.0 * prof[j + 1][2] - prof[j + 2][2]) / (12.0 * h);
        let div = ik[0] * prof[j][0] + ik[1] * prof[j][1] + dz;
        worst = worst.max(div.norm());
    }
    for j in [0, z_samples - 1] {
        let p = prof[j];
        // tangential E and normal B both follow from the in-plane components
        worst = worst.max(p[0].norm()).max(p[1].norm());
        let bz = ik[0] * p[1] - ik[1] * p[0];
        worst = worst.max(bz.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::Boost;
    use crate::plates::closed::stress_closed;

    fn geom(a: f64) -> PlateGeometry {
        PlateGeometry::new(a).unwrap()
    }

    #[test]
    fn mode_spectrum() {
        let m = ModeSpectrum::new(&geom(2.0), 3);
        assert_eq!(m.mass, 1.5 * PI);
        assert!(m.omega(0.0) == m.mass && m.omega(2.0) > m.mass);
    }

    #[test]
    fn rest_frame_matches_closed() {
        let c = CutoffConfig::rest(0.5, 0.0).unwrap();
        let o = stress_oracle(&geom(1.0), &c, &OracleSpec::default()).unwrap();
        let t = stress_closed(&geom(1.0), &c, false).unwrap();
        let dev = o.tensor.max_rel_deviation(&t);
        assert!(dev < 1e-6, "{dev}\n{}\n{}", o.tensor, t);
        assert_eq!(o.tensor.get(0, 1), 0.0);
    }

    #[test]
    fn boosted_matches_closed() {
        let c = CutoffConfig::boosted(&CutoffConfig::rest(0.5, 0.2).unwrap(), &Boost::new(0.3, [1.0, 0.0]).unwrap())
            .unwrap();
        let o = stress_oracle(&geom(1.0), &c, &OracleSpec::default()).unwrap();
        let t = stress_closed(&geom(1.0), &c, false).unwrap();
        let dev = o.tensor.max_rel_deviation(&t);
        assert!(dev < 1e-5, "{dev}\n{}\n{}", o.tensor, t);
        assert!(o.tensor.trace().abs() < 1e-8 * o.tensor.max_abs());
        assert!(o.max_error() < 1e-6 * o.tensor.max_abs());
    }

    #[test]
    fn positive_root_alone_is_half() {
        let c = CutoffConfig::boosted(&CutoffConfig::rest(0.5, 0.0).unwrap(), &Boost::new(0.3, [0.6, 0.8]).unwrap())
            .unwrap();
        let spec = OracleSpec::default().with_tol(1e-8);
        let both = stress_oracle(&geom(1.0), &c, &spec).unwrap().tensor;
        let pos = stress_oracle(&geom(1.0), &c, &spec.with_roots(RootSelection::PositiveOnly)).unwrap().tensor;
        assert!(pos.scaled(2.0).max_rel_deviation(&both) < 1e-6);
        let t = stress_closed(&geom(1.0), &c, false).unwrap();
        assert!(pos.max_rel_deviation(&t) > 0.4);
    }

    #[test]
    fn doubling_n_max_changes_nothing() {
        let (g, c) = (geom(1.0), CutoffConfig::rest(0.3, 0.3).unwrap());
        let spec = OracleSpec::default();
        let base = stress_oracle(&g, &c, &spec).unwrap();
        let doubled = stress_oracle(&g, &c, &spec.with_n_max(2 * base.n_max)).unwrap();
        let diff = base.tensor.minus(&doubled.tensor).max_abs();
        assert!(diff <= base.max_error() + doubled.max_error(), "{diff}");
    }

    #[test]
    fn tail_bound_dominates_actual_tail() {
        let c = CutoffConfig::boosted(&CutoffConfig::rest(0.4, 0.1).unwrap(), &Boost::new(0.5, [1.0, 0.0]).unwrap())
            .unwrap();
        let frame = Frame::new(&c, RootSelection::Both);
        let m = 2.0 * PI;
        let opts = QuadOptions::new(1e-12);
        let k_cut = 30.0;
        let tail = crate::numerics::integrate_vec(|k| frame.angular(m, k, &opts).0, k_cut, 200.0, &opts);
        let bound = frame.tail_bound(m, k_cut);
        for (slot, v) in tail.value.iter().enumerate() {
            // the scalar slot enters the tensor multiplied by m^2
            let weight = if slot == SLOTS - 1 { m * m } else { 1.0 };
            assert!(v.abs() * weight <= bound, "slot {slot}: {v} > {bound}");
        }
    }

    #[test]
    fn fd_matches_closed() {
        let g = geom(1.0);
        let c = CutoffConfig::rest(0.5, 0.0).unwrap();
        let fd = stress_fd(&g, &c, 1e-4).unwrap();
        let t = stress_closed(&g, &c, false).unwrap();
        // exact zeros of the rest frame come out at round-off level
        let scale = t.max_abs();
        for mu in 0..4 {
            for nu in 0..4 {
                let (x, y) = (fd.get(mu, nu), t.get(mu, nu));
                assert!((x - y).abs() <= 1e-6 * y.abs().max(1e-3 * scale), "({mu},{nu}) {x} {y}");
            }
        }
    }

    #[test]
    fn fd_of_constant_is_zero() {
        let t = stress_fd_of(|_| Ok(2.5), &MinkVec3::new(1.0, 0.2, 0.1), 1e-3).unwrap();
        assert_eq!(t, StressTensor::zero());
        assert!(stress_fd_of(|_| Ok(1.0), &MinkVec3::rest(1.0), 0.0).is_err());
    }

    #[test]
    fn eigenmodes_satisfy_boundary_conditions() {
        let g = geom(1.0);
        for (n, lambda, k) in [(1, 1, [1.0, 0.0]), (2, 2, [0.7, 0.3]), (2, 1, [0.7, 0.3]), (1, 2, [0.0, 2.0])] {
            let v = eigenmode_check(n, lambda, k, &g, 2001).unwrap();
            assert!(v <= 1e-6, "n={n} lambda={lambda}: {v}");
        }
    }

    #[test]
    fn detuned_mass_is_caught() {
        let v = eigenmode_check_detuned(1, 1, [1.0, 0.0], &geom(1.0), 2001, 1.1).unwrap();
        assert!(v >= 0.1, "{v}");
        assert!(eigenmode_check(1, 3, [1.0, 0.0], &geom(1.0), 2001).is_err());
        assert!(eigenmode_check(1, 1, [0.0, 0.0], &geom(1.0), 2001).is_err());
    }
}
