use crate::error::{Error, Result};

/// Smallest `N >= 0` with `exp(-x N) / (1 - exp(-x)) <= eps`, i.e. the first
/// index from which the geometric tail `sum_{n >= N} exp(-x n)` is below `eps`.
pub fn geometric_tail_n(ratio_exponent: f64, eps: f64) -> Result<usize> {
    if !(ratio_exponent > 0.0 && ratio_exponent.is_finite()) {
        return Err(Error::DegenerateInput(format!(
            "ratio exponent must be positive, got {ratio_exponent}"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::DegenerateInput(format!("eps must be positive, got {eps}")));
    }
    let denom = -(-ratio_exponent).exp_m1();
    let bound = |n: usize| (-ratio_exponent * n as f64).exp() / denom;
    let guess = ((1.0 / (eps * denom)).ln() / ratio_exponent).ceil();
    let mut n = if guess.is_finite() && guess > 1.0 { guess as usize - 1 } else { 0 };
    // step back over any float overshoot of the guess, then forward
    while n > 0 && bound(n - 1) <= eps {
        n -= 1;
    }
    while bound(n) > eps {
        n += 1;
    }
    Ok(n)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DegenerateInput("need at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::DegenerateInput("log-log fit needs positive finite points".into()));
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x.ln(), sy + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (y.ln() - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Richardson extrapolation to `h -> 0` for `f(h) = L + c1 h^p + c2 h^{2p} + ...`
/// with `p = order`, by Neville elimination in the variable `h^p`.
/// Step sizes need not form a geometric sequence.
pub fn richardson(values: &[(f64, f64)], order: u32) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::DegenerateInput("need at least two samples".into()));
    }
    if order == 0 {
        return Err(Error::DegenerateInput("order must be positive".into()));
    }
    let t: Vec<f64> = values.iter().map(|&(h, _)| h.abs().powi(order as i32)).collect();
    for i in 0..t.len() {
        for j in 0..i {
            if t[i] == t[j] {
                return Err(Error::DegenerateInput("step sizes must be distinct".into()));
            }
        }
    }
    let mut p: Vec<f64> = values.iter().map(|&(_, v)| v).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (ti, tj) = (t[i], t[i + level]);
            // interpolate at t = 0
            p[i] = (tj * p[i] - ti * p[i + 1]) / (tj - ti);
        }
    }
    Ok(p[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_n_examples() {
        let e10 = (-10f64).exp() / (1.0 - (-1f64).exp());
        assert_eq!(geometric_tail_n(1.0, e10).unwrap(), 10);
        assert_eq!(geometric_tail_n(5.0, 0.5).unwrap(), 1);
    }

    #[test]
    fn tail_n_matches_brute_force() {
        for &(x, eps) in &[(0.01f64, 1e-12), (0.3, 1e-9), (2.0, 1e-15), (1e-3, 1e-6)] {
            let denom = 1.0 - (-x).exp();
            let brute = (0..)
                .find(|&n: &usize| (-x * n as f64).exp() / denom <= eps)
                .unwrap();
            assert_eq!(geometric_tail_n(x, eps).unwrap(), brute, "x={x} eps={eps}");
        }
        // solution of exp(-0.01 N) / (1 - exp(-0.01)) = 1e-12 is N = 3224.1
        assert_eq!(geometric_tail_n(0.01, 1e-12).unwrap(), 3225);
    }

    #[test]
    fn tail_n_rejects_bad_input() {
        assert!(geometric_tail_n(0.0, 1e-3).is_err());
        assert!(geometric_tail_n(1.0, 0.0).is_err());
    }

    #[test]
    fn slopes() {
        let sq: Vec<_> = [1.0, 2.0, 4.0].iter().map(|&x: &f64| (x, x * x)).collect();
        assert!((loglog_slope(&sq).unwrap() - 2.0).abs() < 1e-14);
        let inv: Vec<_> = [1.0, 3.0, 9.0].iter().map(|&x: &f64| (x, 7.0 / x.powi(3))).collect();
        assert!((loglog_slope(&inv).unwrap() + 3.0).abs() < 1e-14);
        let flat: Vec<_> = [1.0, 3.0, 9.0].iter().map(|&x| (x, 4.2)).collect();
        assert!(loglog_slope(&flat).unwrap().abs() < 1e-14);
        assert!(loglog_slope(&[(1.0, 1.0)]).is_err());
        assert!(loglog_slope(&[(1.0, 1.0), (2.0, -1.0)]).is_err());
        assert!(loglog_slope(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn richardson_examples() {
        let (l, c, d) = (0.75, -2.0, 5.0);
        let f2 = |h: f64| l + c * h * h;
        let est = richardson(&[(0.2, f2(0.2)), (0.1, f2(0.1))], 2).unwrap();
        assert!((est - l).abs() < 1e-14);

        let f4 = |h: f64| l + c * h * h + d * h.powi(4);
        let hs = [0.2, 0.1, 0.05];
        let est = richardson(&hs.map(|h| (h, f4(h))), 2).unwrap();
        assert!((est - l).abs() < 1e-13);

        let g = |h: f64| l + c * h * h + d * h.powi(4) + 3.0 * h.powi(6);
        let est = richardson(&hs.map(|h| (h, g(h))), 2).unwrap();
        // interpolating t^3 at three nodes leaves exactly t0 t1 t2 at t = 0
        let t: f64 = hs.iter().map(|h| h * h).product();
        assert!((est - l - 3.0 * t).abs() < 1e-13);

        let est = richardson(&[(0.1, 1.01), (0.05, 1.0025)], 2).unwrap();
        assert!((est - 1.0).abs() < 1e-12);

        assert!(richardson(&[(0.1, 1.0)], 2).is_err());
        assert!(richardson(&[(0.1, 1.0), (0.1, 2.0)], 2).is_err());
    }
}
