//! Parallel conducting plates at `z = 0` and `z = a`.
//!
//! Three independent routes to the regularized vacuum stress tensor live
//! here: [`closed`] differentiates the exactly summed generating function,
//! [`oracle`] integrates the momentum-space mode sum by brute force, and
//! [`printed`] evaluates the published closed-form results literally so they
//! can be compared against the other two.

pub mod closed;
pub mod oracle;
pub mod printed;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::minkowski::{Boost, MinkVec3, METRIC4_DIAG};

/// Plate separation `a` (length units, hbar = c = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlateGeometry {
    a: f64,
}

impl PlateGeometry {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.0 && a.is_finite() {
            Ok(Self { a })
        } else {
            Err(Error::InvalidGeometry(format!("plate separation must be positive and finite, got {a}")))
        }
    }

    pub fn separation(&self) -> f64 {
        self.a
    }

    /// Mass `n pi / a` of the n-th transverse mode.
    pub fn mode_mass(&self, n: usize) -> f64 {
        n as f64 * std::f64::consts::PI / self.a
    }
}

/// Symmetric 4x4 array of `<T^{mu nu}>` on (t, x, y, z), units length^-4.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressTensor {
    comps: [[f64; 4]; 4],
}

impl StressTensor {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from the upper triangle `mu <= nu` and mirrors it, so the
    /// result is symmetric bit for bit.
    pub fn from_upper(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut comps = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in mu..4 {
                let v = f(mu, nu);
                comps[mu][nu] = v;
                comps[nu][mu] = v;
            }
        }
        Self { comps }
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.comps[mu][nu]
    }

    pub fn comps(&self) -> &[[f64; 4]; 4] {
        &self.comps
    }

    /// `g_{mu nu} T^{mu nu}` with the mostly-plus 4D metric.
    pub fn trace(&self) -> f64 {
        (0..4).map(|m| METRIC4_DIAG[m] * self.comps[m][m]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|m| (0..4).all(|n| self.comps[m][n] == self.comps[n][m]))
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().flatten().all(|v| v.is_finite())
    }

    /// `Lambda T Lambda^T` with the boost acting on (t, x, y).
    pub fn transformed(&self, boost: &Boost) -> Self {
        let l = boost.matrix4();
        Self::from_upper(|mu, nu| {
            let mut s = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    s += l[mu][a] * l[nu][b] * self.comps[a][b];
                }
            }
            s
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_upper(|m, n| self.comps[m][n] * factor)
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self::from_upper(|m, n| self.comps[m][n] - other.comps[m][n])
    }

    /// Largest componentwise relative deviation
    /// `|a - b| / max(|a|, |b|, 1e-12 * scale)` where `scale` is the larger of
    /// the two tensor magnitudes. The floor keeps exact-zero components
    /// (e.g. the z row) from dividing by zero.
    pub fn max_rel_deviation(&self, other: &Self) -> f64 {
        let floor = 1e-12 * self.max_abs().max(other.max_abs());
        let mut worst = 0.0f64;
        for m in 0..4 {
            for n in 0..4 {
                let (a, b) = (self.comps[m][n], other.comps[m][n]);
                let d = (a - b).abs();
                if d == 0.0 {
                    continue;
                }
                worst = worst.max(d / a.abs().max(b.abs()).max(floor));
            }
        }
        worst
    }
}

impl Serialize for StressTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.comps.serialize(s)
    }
}

impl fmt::Display for StressTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.comps {
            writeln!(f, "[{:>16.9e} {:>16.9e} {:>16.9e} {:>16.9e}]", row[0], row[1], row[2], row[3])?;
        }
        Ok(())
    }
}

/// A scalar function of the invariant `sigma_bar` with its first two
/// `sigma_bar` derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialDerivatives {
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
}

/// Apply `d/dsigma_mu d/dsigma_nu - z^mu z^nu box_sigma` to a scalar function
/// of `sigma_bar`.
///
/// On the (2+1) block
/// `d^mu d^nu f = -g^{mu nu} f1 / sb + sigma^mu sigma^nu (f2 / sb^2 - f1 / sb^3)`,
/// and `box f = -f2 - 2 f1 / sb`; the only z entry is `T^{33} = -box f`.
pub fn tensor_from_radial(d: &RadialDerivatives, sigma: &MinkVec3) -> Result<StressTensor> {
    let sb = crate::minkowski::sigma_bar(sigma)?;
    let s = sigma.components();
    let metric = crate::minkowski::METRIC_DIAG;
    let diag = -d.f1 / sb;
    let outer = d.f2 / (sb * sb) - d.f1 / (sb * sb * sb);
    let t33 = d.f2 + 2.0 * d.f1 / sb;
    Ok(StressTensor::from_upper(|mu, nu| match (mu, nu) {
        (3, 3) => t33,
        (_, 3) => 0.0,
        (m, n) => {
            let g = if m == n { metric[m] } else { 0.0 };
            g * diag + s[m] * s[n] * outer
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::mixed_partial;

    #[test]
    fn geometry_validation() {
        assert!(PlateGeometry::new(1.0).is_ok());
        assert!(PlateGeometry::new(0.0).is_err());
        assert!(PlateGeometry::new(f64::INFINITY).is_err());
        let g = PlateGeometry::new(2.0).unwrap();
        assert!((g.mode_mass(3) - 1.5 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn power_law_radial_profile() {
        // f = sb^p gives T33 = p (p + 1) sb^(p - 2); p = -1 is annihilated
        let sigma = MinkVec3::new(1.3, 0.4, -0.2);
        let sb = crate::minkowski::sigma_bar(&sigma).unwrap();
        for p in [-3.0, -2.0, -1.0, 1.0, 2.5] {
            let d = RadialDerivatives {
                f: sb.powf(p),
                f1: p * sb.powf(p - 1.0),
                f2: p * (p - 1.0) * sb.powf(p - 2.0),
            };
            let t = tensor_from_radial(&d, &sigma).unwrap();
            let expected = p * (p + 1.0) * sb.powf(p - 2.0);
            assert!((t.get(3, 3) - expected).abs() <= 1e-13 * expected.abs().max(1.0), "p={p}");
            assert!(t.trace().abs() <= 1e-13 * t.max_abs());
            assert!(t.is_symmetric());
        }
    }

    #[test]
    fn chain_rule_matches_finite_differences() {
        // f = sb^-2 as a function of the three contravariant components
        let sigma = MinkVec3::new(1.1, 0.3, 0.2);
        let f = |c: [f64; 3]| {
            let s2 = c[0] * c[0] - c[1] * c[1] - c[2] * c[2];
            1.0 / s2
        };
        let sb = crate::minkowski::sigma_bar(&sigma).unwrap();
        let d = RadialDerivatives {
            f: sb.powi(-2),
            f1: -2.0 * sb.powi(-3),
            f2: 6.0 * sb.powi(-4),
        };
        let t = tensor_from_radial(&d, &sigma).unwrap();
        let c = sigma.components();
        let h = 1e-4;
        let metric = crate::minkowski::METRIC_DIAG;
        let mut boxf = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                // derivative by covariant components flips sign per time index
                let fd = metric[i] * metric[j] * mixed_partial(&f, c, i, j, h);
                assert!((fd - t.get(i, j)).abs() < 1e-6 * t.max_abs(), "({i},{j})");
                if i == j {
                    boxf += metric[i] * mixed_partial(&f, c, i, i, h);
                }
            }
        }
        assert!((-boxf - t.get(3, 3)).abs() < 1e-6 * t.max_abs());
    }

    #[test]
    fn constants_are_annihilated() {
        let d = RadialDerivatives { f: 3.0, f1: 0.0, f2: 0.0 };
        let t = tensor_from_radial(&d, &MinkVec3::new(2.0, 0.5, 0.5)).unwrap();
        assert_eq!(t, StressTensor::zero());
    }

    #[test]
    fn rest_frame_has_no_mixed_time_space() {
        let d = RadialDerivatives { f: 1.0, f1: -0.7, f2: 2.3 };
        let t = tensor_from_radial(&d, &MinkVec3::rest(0.8)).unwrap();
        assert_eq!(t.get(0, 1), 0.0);
        assert_eq!(t.get(0, 2), 0.0);
        assert_eq!(t.get(1, 1), t.get(2, 2));
    }

    #[test]
    fn rejects_spacelike() {
        let d = RadialDerivatives { f: 1.0, f1: 1.0, f2: 1.0 };
        assert!(tensor_from_radial(&d, &MinkVec3::new(0.5, 1.0, 0.0)).is_err());
    }
}
