//! Adaptive Gauss-Kronrod quadrature.
//!
//! A single 10/21-point Gauss-Kronrod pair drives global adaptive bisection
//! (the interval with the largest error estimate is split first). The rule
//! is written once over fixed-width vectors `[f64; K]` so that the oracle can
//! integrate all tensor components in one pass; scalar integrands are the
//! `K = 1` case.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Outcome of any numerical integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    /// The error estimate met the requested tolerance.
    pub converged: bool,
}

impl QuadratureResult {
    /// Turn a non-converged result into [`Error::NoConvergence`].
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                value: self.value,
                abs_error: self.abs_error_estimate,
                evaluations: self.evaluations,
            })
        }
    }
}

/// Vector-valued counterpart of [`QuadratureResult`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecQuadrature<const K: usize> {
    pub value: [f64; K],
    pub abs_error_estimate: [f64; K],
    pub evaluations: usize,
    pub converged: bool,
}

impl<const K: usize> VecQuadrature<K> {
    pub fn max_error(&self) -> f64 {
        self.abs_error_estimate.iter().fold(0.0, |m, e| m.max(*e))
    }
}

/// Tolerances for adaptive integration. Converged means the summed error
/// estimate is at most `max(abs_tol, rel_tol * |value|)` (max-norm over
/// components for vector integrands).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            max_subdivisions: 2000,
        }
    }

    pub fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

struct Segment<const K: usize> {
    lo: f64,
    hi: f64,
    value: [f64; K],
    error: [f64; K],
    priority: f64,
}

impl<const K: usize> PartialEq for Segment<K> {
    fn eq(&self, other: &Self) -> bool {
        self.priority.total_cmp(&other.priority) == Ordering::Equal
    }
}
impl<const K: usize> Eq for Segment<K> {}
impl<const K: usize> PartialOrd for Segment<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const K: usize> Ord for Segment<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            // deterministic tie-break: leftmost first
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
fn gk21<const K: usize, F>(f: &mut F, lo: f64, hi: f64) -> ([f64; K], [f64; K])
where
    F: FnMut(f64) -> [f64; K],
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_k = [0.0; K];
    let mut res_g = [0.0; K];
    let mut res_abs = [0.0; K];
    let mut fv1 = [[0.0; K]; 10];
    let mut fv2 = [[0.0; K]; 10];

    for k in 0..K {
        res_k[k] = WGK[10] * fc[k];
        res_abs[k] = (WGK[10] * fc[k]).abs();
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for k in 0..K {
            res_k[k] += WGK[j] * (f1[k] + f2[k]);
            res_abs[k] += WGK[j] * (f1[k].abs() + f2[k].abs());
            if j % 2 == 1 {
                res_g[k] += WG[j / 2] * (f1[k] + f2[k]);
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }

    let mut value = [0.0; K];
    let mut error = [0.0; K];
    for k in 0..K {
        let mean = 0.5 * res_k[k];
        let mut res_asc = WGK[10] * (fc[k] - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv1[j][k] - mean).abs() + (fv2[j][k] - mean).abs());
        }
        let res_abs_k = res_abs[k] * abs_half;
        res_asc *= abs_half;
        let mut err = ((res_k[k] - res_g[k]) * half).abs();
        if res_asc != 0.0 && err != 0.0 {
            err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
        }
        let floor = 50.0 * f64::EPSILON * res_abs_k;
        if res_abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(floor);
        }
        value[k] = res_k[k] * half;
        error[k] = err;
    }
    (value, error)
}

fn norm<const K: usize>(v: &[f64; K]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Global adaptive integration of a vector-valued integrand over `[lo, hi]`.
///
/// Never fails: a budget overrun is reported through `converged = false`.
pub fn integrate_vec<const K: usize, F>(f: F, lo: f64, hi: f64, opts: &QuadOptions) -> VecQuadrature<K>
where
    F: FnMut(f64) -> [f64; K],
{
    integrate_vec_breaks(f, &[lo, hi], opts)
}

/// [`integrate_vec`] starting from the panels delimited by `breaks`
/// (sorted, at least two points).
pub fn integrate_vec_breaks<const K: usize, F>(mut f: F, breaks: &[f64], opts: &QuadOptions) -> VecQuadrature<K>
where
    F: FnMut(f64) -> [f64; K],
{
    let mut heap = BinaryHeap::new();
    let mut total = [0.0; K];
    let mut total_err = [0.0; K];
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        let (value, error) = gk21(&mut f, w[0], w[1]);
        evaluations += 21;
        for k in 0..K {
            total[k] += value[k];
            total_err[k] += error[k];
        }
        heap.push(Segment {
            lo: w[0],
            hi: w[1],
            value,
            error,
            priority: norm(&error),
        });
    }
    let mut splits = 0;
    loop {
        if norm(&total_err) <= opts.target(norm(&total)) {
            break;
        }
        if splits >= opts.max_subdivisions {
            break;
        }
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo.min(seg.hi) || mid >= seg.lo.max(seg.hi) {
            // cannot bisect further in floating point
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk21(&mut f, seg.lo, mid);
        let (v2, e2) = gk21(&mut f, mid, seg.hi);
        evaluations += 42;
        splits += 1;
        for k in 0..K {
            total[k] += v1[k] + v2[k] - seg.value[k];
            total_err[k] += e1[k] + e2[k] - seg.error[k];
        }
        heap.push(Segment {
            lo: seg.lo,
            hi: mid,
            value: v1,
            error: e1,
            priority: norm(&e1),
        });
        heap.push(Segment {
            lo: mid,
            hi: seg.hi,
            value: v2,
            error: e2,
            priority: norm(&e2),
        });
    }

    // re-sum from the leaves in interval order so the result does not carry
    // the drift of the running updates
    let mut leaves: Vec<_> = heap.into_vec();
    leaves.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut value = [0.0; K];
    let mut error = [0.0; K];
    for k in 0..K {
        let mut s = super::CompensatedSum::new();
        let mut e = 0.0;
        for seg in &leaves {
            s.add(seg.value[k]);
            e += seg.error[k];
        }
        value[k] = s.value();
        error[k] = e;
    }
    let converged = norm(&error) <= opts.target(norm(&value));
    VecQuadrature {
        value,
        abs_error_estimate: error,
        evaluations,
        converged,
    }
}

/// Scalar adaptive integration, reporting non-convergence in the flag.
pub fn integrate_adaptive<F>(mut f: F, lo: f64, hi: f64, opts: &QuadOptions) -> QuadratureResult
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec(|x| [f(x)], lo, hi, opts);
    QuadratureResult {
        value: r.value[0],
        abs_error_estimate: r.abs_error_estimate[0],
        evaluations: r.evaluations,
        converged: r.converged,
    }
}

/// Adaptive estimate of `int_lo^hi f` with absolute and relative tolerance
/// both equal to `tol`.
pub fn integrate_finite<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    check_interval(lo, hi, tol)?;
    let mut f = f;
    let r = integrate_vec_breaks(|x| [f(x)], &graded_breaks(lo, hi), &QuadOptions::new(tol));
    QuadratureResult {
        value: r.value[0],
        abs_error_estimate: r.abs_error_estimate[0],
        evaluations: r.evaluations,
        converged: r.converged,
    }
    .into_result()
}

/// Breakpoints refined geometrically toward both ends, so that features
/// much narrower than the interval near either endpoint are sampled.
fn graded_breaks(lo: f64, hi: f64) -> Vec<f64> {
    const LEVELS: i32 = 12;
    let half = 0.5 * (hi - lo);
    let mut pts = vec![lo];
    for j in (1..=LEVELS).rev() {
        pts.push(lo + half * 4f64.powi(-j));
    }
    pts.push(lo + half);
    for j in 1..=LEVELS {
        pts.push(hi - half * 4f64.powi(-j));
    }
    pts.push(hi);
    pts.dedup();
    pts
}

/// Estimate of `int_0^inf f` through `y = s u / (1 - u)` with `s = decay_hint`.
pub fn integrate_semi_infinite<F>(f: F, tol: f64, decay_hint: f64) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    if !(decay_hint > 0.0 && decay_hint.is_finite()) {
        return Err(Error::DegenerateInput(format!("decay_hint must be positive, got {decay_hint}")));
    }
    check_interval(0.0, 1.0, tol)?;
    integrate_semi_infinite_with(f, decay_hint, &QuadOptions::new(tol)).into_result()
}

/// [`integrate_semi_infinite`] with explicit options and no error conversion.
pub fn integrate_semi_infinite_with<F>(mut f: F, decay_hint: f64, opts: &QuadOptions) -> QuadratureResult
where
    F: FnMut(f64) -> f64,
{
    integrate_adaptive(
        |u| {
            let w = 1.0 - u;
            if w <= 0.0 {
                return 0.0;
            }
            let y = decay_hint * u / w;
            let v = f(y) * decay_hint / (w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Vector-valued [`integrate_semi_infinite_with`].
pub fn integrate_semi_infinite_vec<const K: usize, F>(mut f: F, decay_hint: f64, opts: &QuadOptions) -> VecQuadrature<K>
where
    F: FnMut(f64) -> [f64; K],
{
    integrate_vec(
        |u| {
            let w = 1.0 - u;
            if w <= 0.0 {
                return [0.0; K];
            }
            let y = decay_hint * u / w;
            let jac = decay_hint / (w * w);
            let mut v = f(y);
            for x in &mut v {
                *x *= jac;
                if !x.is_finite() {
                    *x = 0.0;
                }
            }
            v
        },
        0.0,
        1.0,
        opts,
    )
}

/// Integral over one full period of a smooth periodic integrand by the
/// trapezoidal rule, doubling the point count until two successive levels
/// agree. Convergence is geometric for analytic integrands.
pub fn integrate_periodic<const K: usize, F>(
    mut f: F,
    start: f64,
    period: f64,
    opts: &QuadOptions,
    min_points: usize,
) -> VecQuadrature<K>
where
    F: FnMut(f64) -> [f64; K],
{
    const MAX_POINTS: usize = 1 << 14;
    let mut n = min_points.max(4).next_power_of_two();
    let mut sum = [0.0; K];
    for i in 0..n {
        let v = f(start + period * i as f64 / n as f64);
        for k in 0..K {
            sum[k] += v[k];
        }
    }
    let mut evaluations = n;
    let mut prev: [f64; K] = std::array::from_fn(|k| sum[k] * period / n as f64);
    loop {
        // add the midpoints of the current level
        for i in 0..n {
            let v = f(start + period * (i as f64 + 0.5) / n as f64);
            for k in 0..K {
                sum[k] += v[k];
            }
        }
        evaluations += n;
        n *= 2;
        let cur: [f64; K] = std::array::from_fn(|k| sum[k] * period / n as f64);
        let err: [f64; K] = std::array::from_fn(|k| (cur[k] - prev[k]).abs());
        let converged = norm(&err) <= opts.target(norm(&cur));
        if converged || n >= MAX_POINTS {
            return VecQuadrature {
                value: cur,
                abs_error_estimate: err,
                evaluations,
                converged,
            };
        }
        prev = cur;
    }
}

fn check_interval(lo: f64, hi: f64, tol: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::DegenerateInput(format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::DegenerateInput(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}
