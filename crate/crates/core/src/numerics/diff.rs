use serde::{Deserialize, Serialize};

/// Derivative order supported by [`central_diff`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Truncation/round-off balanced step: cube root of epsilon for first
/// derivatives, fourth root for second, scaled by `max(1, |x0|)`.
pub fn default_step(x0: f64, order: DerivativeOrder) -> f64 {
    let scale = x0.abs().max(1.0);
    match order {
        DerivativeOrder::First => f64::EPSILON.cbrt() * scale,
        DerivativeOrder::Second => f64::EPSILON.powf(0.25) * scale,
    }
}

/// Second-order accurate central difference.
pub fn central_diff<F>(f: F, x0: f64, order: DerivativeOrder, h: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    match order {
        DerivativeOrder::First => (f(x0 + h) - f(x0 - h)) / (2.0 * h),
        DerivativeOrder::Second => (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h),
    }
}

/// Mixed partial `d^2 f / dx_i dx_j` of a function of several variables by
/// the four-point central stencil (the three-point second difference when
/// `i == j`).
pub fn mixed_partial<F, const N: usize>(f: &F, x0: [f64; N], i: usize, j: usize, h: f64) -> f64
where
    F: Fn([f64; N]) -> f64,
{
    let shifted = |di: f64, dj: f64| {
        let mut x = x0;
        x[i] += di;
        x[j] += dj;
        f(x)
    };
    if i == j {
        let mut plus = x0;
        let mut minus = x0;
        plus[i] += h;
        minus[i] -= h;
        (f(plus) - 2.0 * f(x0) + f(minus)) / (h * h)
    } else {
        (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::loglog_slope;

    #[test]
    fn quadratic_is_exact() {
        let d = central_diff(|x| x * x, 3.0, DerivativeOrder::First, 0.1);
        assert!((d - 6.0).abs() < 1e-13);
    }

    #[test]
    fn cubic_second_derivative() {
        let h = 1e-3;
        let d = central_diff(|x| x * x * x, 1.0, DerivativeOrder::Second, h);
        assert!((d - 6.0).abs() < 10.0 * h * h + 1e-8);
    }

    #[test]
    fn exp_first_derivative() {
        let d = central_diff(f64::exp, 0.0, DerivativeOrder::First, 1e-5);
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn default_steps_are_accurate() {
        let x0 = 0.7;
        let h1 = default_step(x0, DerivativeOrder::First);
        let h2 = default_step(x0, DerivativeOrder::Second);
        assert!((central_diff(f64::sin, x0, DerivativeOrder::First, h1) - x0.cos()).abs() < 1e-10);
        assert!((central_diff(f64::sin, x0, DerivativeOrder::Second, h2) + x0.sin()).abs() < 1e-7);
    }

    #[test]
    fn converges_at_second_order() {
        for order in [DerivativeOrder::First, DerivativeOrder::Second] {
            let exact = match order {
                DerivativeOrder::First => 0.3f64.cos(),
                DerivativeOrder::Second => -(0.3f64.sin()),
            };
            let pts: Vec<(f64, f64)> = [0.04, 0.02, 0.01, 0.005]
                .iter()
                .map(|&h| (h, (central_diff(f64::sin, 0.3, order, h) - exact).abs()))
                .collect();
            let slope = loglog_slope(&pts).unwrap();
            assert!((slope - 2.0).abs() < 0.05, "{order:?}: {slope}");
        }
    }

    #[test]
    fn mixed_partial_of_product() {
        let f = |x: [f64; 2]| x[0] * x[0] * x[1] + (x[1]).exp();
        let d01 = mixed_partial(&f, [0.5, 0.2], 0, 1, 1e-4);
        assert!((d01 - 1.0).abs() < 1e-7);
        let d11 = mixed_partial(&f, [0.5, 0.2], 1, 1, 1e-4);
        assert!((d11 - 0.2f64.exp()).abs() < 1e-6);
    }
}
