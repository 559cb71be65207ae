//! (2+1)-dimensional Minkowski vectors in the mostly-plus metric.
//!
//! The plates live in the (t, x, y) subspace orthogonal to the plate normal
//! `z`, so the vector cutoff has no z component at all and the
//! orthogonality to the normal holds by construction. Components are stored
//! contravariant; covariant components are only ever produced by applying
//! [`METRIC_DIAG`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal of the (2+1) metric, signature (-, +, +).
pub const METRIC_DIAG: [f64; 3] = [-1.0, 1.0, 1.0];

/// Diagonal of the 4D metric on (t, x, y, z), signature (-, +, +, +).
pub const METRIC4_DIAG: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Contravariant (2+1)-vector `(t, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkVec3 {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl MinkVec3 {
    pub const fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    /// Rest-frame vector `(t, 0, 0)`.
    pub const fn rest(t: f64) -> Self {
        Self { t, x: 0.0, y: 0.0 }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.t, self.x, self.y]
    }

    pub fn from_components(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite()
    }

    /// Magnitude of the spatial part.
    pub fn spatial_norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Components of the covariant vector `v_mu = g_{mu nu} v^nu`.
    pub fn lower(&self) -> [f64; 3] {
        let c = self.components();
        [METRIC_DIAG[0] * c[0], METRIC_DIAG[1] * c[1], METRIC_DIAG[2] * c[2]]
    }
}

/// `u . v = -u.t v.t + u.x v.x + u.y v.y`.
pub fn inner(u: &MinkVec3, v: &MinkVec3) -> f64 {
    -u.t * v.t + u.x * v.x + u.y * v.y
}

/// Invariant magnitude `sqrt(-sigma . sigma)` of a timelike vector.
pub fn sigma_bar(sigma: &MinkVec3) -> Result<f64> {
    if !sigma.is_finite() {
        return Err(Error::NonFinite("vector cutoff"));
    }
    let s2 = inner(sigma, sigma);
    if s2 >= 0.0 {
        return Err(Error::NonTimelike { inner: s2 });
    }
    Ok((-s2).sqrt())
}

/// Pure Lorentz boost of the (2+1) subspace along an in-plane direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boost {
    rapidity: f64,
    direction: [f64; 2],
}

impl Boost {
    pub fn new(rapidity: f64, direction: [f64; 2]) -> Result<Self> {
        let norm = direction[0].hypot(direction[1]);
        if !rapidity.is_finite() || !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::BadDirection { norm });
        }
        Ok(Self { rapidity, direction })
    }

    pub fn rapidity(&self) -> f64 {
        self.rapidity
    }

    pub fn direction(&self) -> [f64; 2] {
        self.direction
    }

    /// `Lambda^mu_nu` on (t, x, y).
    pub fn matrix3(&self) -> [[f64; 3]; 3] {
        let (ch, sh) = (self.rapidity.cosh(), self.rapidity.sinh());
        let [dx, dy] = self.direction;
        // cosh(eta) - 1 loses everything for tiny rapidities
        let chm1 = 2.0 * (0.5 * self.rapidity).sinh().powi(2);
        [
            [ch, sh * dx, sh * dy],
            [sh * dx, 1.0 + chm1 * dx * dx, chm1 * dx * dy],
            [sh * dy, chm1 * dx * dy, 1.0 + chm1 * dy * dy],
        ]
    }

    /// The 4D transform acting on (t, x, y) with z untouched.
    pub fn matrix4(&self) -> [[f64; 4]; 4] {
        let m = self.matrix3();
        let mut out = [[0.0; 4]; 4];
        for (i, row) in m.iter().enumerate() {
            out[i][..3].copy_from_slice(row);
        }
        out[3][3] = 1.0;
        out
    }

    pub fn apply(&self, v: &MinkVec3) -> MinkVec3 {
        let m = self.matrix3();
        let c = v.components();
        let mut out = [0.0; 3];
        for (o, row) in out.iter_mut().zip(m.iter()) {
            *o = row.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
        }
        MinkVec3::from_components(out)
    }
}

/// Boost `v` by `rapidity` along the unit in-plane `direction`.
pub fn boost(v: &MinkVec3, rapidity: f64, direction: [f64; 2]) -> Result<MinkVec3> {
    Ok(Boost::new(rapidity, direction)?.apply(v))
}

/// Validated regularization state: vector cutoff, scalar cutoff and the
/// derived invariant `sigma_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffConfig {
    vector: MinkVec3,
    scalar: f64,
    sigma_bar: f64,
}

impl CutoffConfig {
    /// The vector cutoff `sigma^mu`.
    pub fn vector(&self) -> MinkVec3 {
        self.vector
    }

    /// The scalar cutoff `Sigma`.
    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn sigma_bar(&self) -> f64 {
        self.sigma_bar
    }

    /// `Sigma / sigma_bar`, always in `[0, 1)`.
    pub fn ratio(&self) -> f64 {
        self.scalar / self.sigma_bar
    }

    /// Rest-frame configuration with `sigma = (sigma_bar, 0, 0)` and
    /// `Sigma = ratio * sigma_bar`.
    pub fn rest(sigma_bar: f64, ratio: f64) -> Result<Self> {
        validate_cutoff(MinkVec3::rest(sigma_bar), ratio * sigma_bar)
    }

    /// Same invariants with the vector cutoff boosted.
    pub fn boosted(&self, boost: &Boost) -> Result<Self> {
        validate_cutoff(boost.apply(&self.vector), self.scalar)
    }
}

/// Accepts exactly `{sigma timelike, sigma.t > 0, 0 <= Sigma < sigma_bar}`.
pub fn validate_cutoff(sigma: MinkVec3, scalar: f64) -> Result<CutoffConfig> {
    let sb = sigma_bar(&sigma)?;
    if sigma.t <= 0.0 {
        return Err(Error::NegativeTimeComponent { t: sigma.t });
    }
    if !scalar.is_finite() {
        return Err(Error::NonFinite("scalar cutoff"));
    }
    if scalar < 0.0 {
        return Err(Error::NegativeSigma(scalar));
    }
    if scalar >= sb {
        return Err(Error::SigmaTooLarge {
            sigma_scalar: scalar,
            sigma_bar: sb,
        });
    }
    Ok(CutoffConfig {
        vector: sigma,
        scalar,
        sigma_bar: sb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inner_products() {
        let e0 = MinkVec3::new(1.0, 0.0, 0.0);
        let e1 = MinkVec3::new(0.0, 1.0, 0.0);
        assert_eq!(inner(&e0, &e0), -1.0);
        assert_eq!(inner(&e1, &e1), 1.0);
        assert_eq!(inner(&MinkVec3::new(3.0, 1.0, 2.0), &MinkVec3::new(1.0, 1.0, 1.0)), 0.0);
    }

    #[test]
    fn sigma_bar_values() {
        assert_eq!(sigma_bar(&MinkVec3::new(1.0, 0.0, 0.0)).unwrap(), 1.0);
        assert!(matches!(
            sigma_bar(&MinkVec3::new(5.0, 3.0, 4.0)),
            Err(Error::NonTimelike { .. })
        ));
        let s = sigma_bar(&MinkVec3::new(2.0, 1.0, 1.0)).unwrap();
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn boost_textbook() {
        let v = MinkVec3::new(1.0, 0.0, 0.0);
        assert_eq!(boost(&v, 0.0, [1.0, 0.0]).unwrap(), v);
        let eta = 0.9;
        let b = boost(&v, eta, [1.0, 0.0]).unwrap();
        assert!((b.t - eta.cosh()).abs() < 1e-15);
        assert!((b.x - eta.sinh()).abs() < 1e-15);
        assert_eq!(b.y, 0.0);

        let v = MinkVec3::new(2.0, 1.0, 1.0);
        let b = boost(&v, 0.7, [0.6, 0.8]).unwrap();
        assert!((sigma_bar(&b).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn boost_rejects_bad_direction() {
        let v = MinkVec3::rest(1.0);
        assert!(matches!(boost(&v, 0.1, [1.0, 0.1]), Err(Error::BadDirection { .. })));
        assert!(matches!(boost(&v, 0.1, [0.0, 0.0]), Err(Error::BadDirection { .. })));
    }

    #[test]
    fn validate_cutoff_cases() {
        let c = validate_cutoff(MinkVec3::rest(1.0), 0.5).unwrap();
        assert_eq!(c.sigma_bar(), 1.0);
        assert_eq!(c.ratio(), 0.5);
        assert!(matches!(
            validate_cutoff(MinkVec3::rest(1.0), 1.0),
            Err(Error::SigmaTooLarge { .. })
        ));
        assert!(matches!(
            validate_cutoff(MinkVec3::rest(-1.0), 0.0),
            Err(Error::NegativeTimeComponent { .. })
        ));
        assert!(matches!(
            validate_cutoff(MinkVec3::rest(1.0), -0.1),
            Err(Error::NegativeSigma(_))
        ));
        // lightlike boundary is rejected, no epsilon slack
        assert!(matches!(
            validate_cutoff(MinkVec3::new(1.0, 1.0, 0.0), 0.0),
            Err(Error::NonTimelike { .. })
        ));
    }

    fn unit_dir() -> impl Strategy<Value = [f64; 2]> {
        (0.0..std::f64::consts::TAU).prop_map(|th: f64| [th.cos(), th.sin()])
    }

    proptest! {
        #[test]
        fn boosts_compose_along_one_direction(
            t in 0.5f64..3.0, x in -0.4f64..0.4, y in -0.4f64..0.4,
            e1 in -1.0f64..1.0, e2 in -1.0f64..1.0, d in unit_dir(),
        ) {
            let v = MinkVec3::new(t, x, y);
            let two = boost(&boost(&v, e1, d).unwrap(), e2, d).unwrap();
            let one = boost(&v, e1 + e2, d).unwrap();
            let scale = one.components().iter().fold(0.0f64, |m, c| m.max(c.abs()));
            for (a, b) in two.components().iter().zip(one.components()) {
                prop_assert!((a - b).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn sigma_bar_is_boost_invariant(
            sb in 0.01f64..5.0, x in -3.0f64..3.0, th in 0.0f64..std::f64::consts::TAU,
            eta in -2.0f64..2.0, d in unit_dir(),
        ) {
            // build a timelike vector with the requested invariant
            let sigma = MinkVec3::new((sb * sb + x * x).sqrt(), x * th.cos(), x * th.sin());
            let s0 = sigma_bar(&sigma).unwrap();
            let s1 = sigma_bar(&boost(&sigma, eta, d).unwrap()).unwrap();
            prop_assert!((s0 - s1).abs() <= 1e-10 * s0);
        }

        #[test]
        fn validate_accepts_exactly_the_physical_set(
            t in -2.0f64..2.0, x in -2.0f64..2.0, y in -2.0f64..2.0, s in -1.0f64..2.0,
        ) {
            let v = MinkVec3::new(t, x, y);
            let inner_vv = inner(&v, &v);
            let expected = inner_vv < 0.0 && t > 0.0 && s >= 0.0 && s < (-inner_vv).sqrt();
            prop_assert_eq!(validate_cutoff(v, s).is_ok(), expected);
        }
    }
}
