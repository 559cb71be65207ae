//! Reusable numerical kernels: adaptive quadrature, compensated summation,
//! finite differences, extrapolation and slope fitting.

mod diff;
mod extrap;
mod quad;
mod sum;

pub use diff::{central_diff, default_step, mixed_partial, DerivativeOrder};
pub use extrap::{geometric_tail_n, loglog_slope, richardson};
pub use quad::{
    integrate_adaptive, integrate_finite, integrate_periodic, integrate_semi_infinite,
    integrate_semi_infinite_vec, integrate_semi_infinite_with, integrate_vec, integrate_vec_breaks, QuadOptions, QuadratureResult, VecQuadrature,
};
pub use sum::{compensated_sum, CompensatedSum};
