//! Unit-quaternion algebra and the log/exp maps between S³ and the open
//! ball of radius π in R³.
//!
//! Quaternions are stored scalar-first, `[w, x, y, z]`. The log map returns
//! `arccos(w) * u / |u|`, i.e. the *half* rotation angle times the axis, and
//! the exp map is its inverse on `|z| < π`. Angular velocities relate to
//! quaternion increments through `q(t + dt) = exp(ω dt / 2) * q(t)`.

mod demo;

pub use demo::{align_hemispheres, gen_minjerk_demos, gen_rhythmic_demos, QuatDemo};

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Mul, Neg};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 3-vector in the tangent (log) space. Radians.
pub type Tangent3 = Vector3<f64>;

/// Body angular velocity in rad/s.
pub type AngularVelocity = Vector3<f64>;

/// Tolerance used to recognise `[-1, 0, 0, 0]`, the antipode of identity.
pub const ANTIPODE_TOL: f64 = 1e-9;

/// Below this imaginary-part norm the log map returns the zero vector.
const LOG_ZERO_TOL: f64 = 1e-12;

/// A quaternion of unit norm.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct UnitQuaternion {
    w: f64,
    v: Vector3<f64>,
}

impl UnitQuaternion {
    /// Builds a unit quaternion, normalizing `[w, x, y, z]`.
    ///
    /// Input already of unit norm to within a few ulps is kept bit for bit,
    /// so serialized quaternions read back unchanged.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n < 1e-12 {
            return Err(Error::InvalidInput(format!(
                "cannot normalize quaternion [{w}, {x}, {y}, {z}]"
            )));
        }
        if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self {
                w,
                v: Vector3::new(x, y, z),
            });
        }
        Ok(Self {
            w: w / n,
            v: Vector3::new(x / n, y / n, z / n),
        })
    }

    pub fn from_array(c: [f64; 4]) -> Result<Self> {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn identity() -> Self {
        Self {
            w: 1.0,
            v: Vector3::zeros(),
        }
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// Imaginary part.
    pub fn vec(&self) -> Vector3<f64> {
        self.v
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.v.x, self.v.y, self.v.z]
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.v.norm_squared()).sqrt()
    }

    /// Four-dimensional inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.w * other.w + self.v.dot(&other.v)
    }

    pub fn conj(&self) -> Self {
        Self {
            w: self.w,
            v: -self.v,
        }
    }

    /// Hamilton product, renormalized.
    pub fn prod(&self, rhs: &Self) -> Self {
        let w = self.w * rhs.w - self.v.dot(&rhs.v);
        let v = rhs.v * self.w + self.v * rhs.w + self.v.cross(&rhs.v);
        let n = (w * w + v.norm_squared()).sqrt();
        Self { w: w / n, v: v / n }
    }

    /// True when the quaternion is `[-1, 0, 0, 0]` within [`ANTIPODE_TOL`].
    pub fn is_antipode(&self) -> bool {
        self.w < -1.0 + ANTIPODE_TOL && self.v.norm() < ANTIPODE_TOL
    }

    /// Log map `S³ \ {[-1,0,0,0]} -> R³`.
    pub fn log(&self) -> Result<Tangent3> {
        if self.is_antipode() {
            return Err(Error::Domain(
                "log is undefined at [-1, 0, 0, 0]".to_string(),
            ));
        }
        let un = self.v.norm();
        if un < LOG_ZERO_TOL {
            return Ok(Tangent3::zeros());
        }
        // atan2 equals arccos(w) on the unit sphere and stays accurate near w = ±1.
        let angle = un.atan2(self.w);
        Ok(self.v * (angle / un))
    }

    /// Exp map `{|z| < π} -> S³`.
    pub fn exp(z: &Tangent3) -> Result<Self> {
        let n = z.norm();
        if !n.is_finite() || n >= PI {
            return Err(Error::Domain(format!(
                "exp requires |z| < pi, got |z| = {n}"
            )));
        }
        if n == 0.0 {
            return Ok(Self::identity());
        }
        let (s, c) = n.sin_cos();
        let v = z * (s / n);
        let norm = (c * c + v.norm_squared()).sqrt();
        Ok(Self {
            w: c / norm,
            v: v / norm,
        })
    }
}

impl Default for UnitQuaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl fmt::Debug for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}, {}, {}]",
            self.w, self.v.x, self.v.y, self.v.z
        )
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;

    fn mul(self, rhs: Self) -> Self {
        self.prod(&rhs)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;

    fn neg(self) -> Self {
        Self {
            w: -self.w,
            v: -self.v,
        }
    }
}

impl TryFrom<[f64; 4]> for UnitQuaternion {
    type Error = Error;

    fn try_from(c: [f64; 4]) -> Result<Self> {
        Self::from_array(c)
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(q: UnitQuaternion) -> Self {
        q.to_array()
    }
}

pub fn qprod(a: &UnitQuaternion, b: &UnitQuaternion) -> UnitQuaternion {
    a.prod(b)
}

pub fn conj(q: &UnitQuaternion) -> UnitQuaternion {
    q.conj()
}

pub fn qlog(q: &UnitQuaternion) -> Result<Tangent3> {
    q.log()
}

pub fn qexp(z: &Tangent3) -> Result<UnitQuaternion> {
    UnitQuaternion::exp(z)
}

/// Orientation distance: `2 |log(a * conj(b))|`, or `2π` when the relative
/// quaternion is the antipode of identity.
pub fn quat_distance(a: &UnitQuaternion, b: &UnitQuaternion) -> f64 {
    let rel = a.prod(&b.conj());
    match rel.log() {
        Ok(z) => 2.0 * z.norm(),
        Err(_) => 2.0 * PI,
    }
}

/// Advances `q` by the angular velocity `omega` over `dt`: `exp(ω dt/2) * q`.
pub fn integrate_omega(
    q: &UnitQuaternion,
    omega: &AngularVelocity,
    dt: f64,
) -> Result<UnitQuaternion> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    if *omega == AngularVelocity::zeros() {
        return Ok(*q);
    }
    Ok(UnitQuaternion::exp(&(omega * (0.5 * dt)))?.prod(q))
}

/// Angular velocity taking `q_t` to `q_next` over `dt`:
/// `(2/dt) log(q_next * conj(q_t))`.
pub fn differentiate_omega(
    q_t: &UnitQuaternion,
    q_next: &UnitQuaternion,
    dt: f64,
) -> Result<AngularVelocity> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let rel = q_next.prod(&q_t.conj());
    Ok(rel.log()? * (2.0 / dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> UnitQuaternion {
        UnitQuaternion::new(w, x, y, z).unwrap()
    }

    fn close(a: &UnitQuaternion, b: &UnitQuaternion, tol: f64) -> bool {
        a.to_array()
            .iter()
            .zip(b.to_array().iter())
            .all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn product_identities() {
        let a = q(0.3, -0.2, 0.9, 0.1);
        assert!(close(&qprod(&UnitQuaternion::identity(), &a), &a, 1e-15));
        assert!(close(&qprod(&a, &a.conj()), &UnitQuaternion::identity(), 1e-15));
        // i * j = k
        let k = qprod(&q(0.0, 1.0, 0.0, 0.0), &q(0.0, 0.0, 1.0, 0.0));
        assert!(close(&k, &q(0.0, 0.0, 0.0, 1.0), 1e-15));
    }

    #[test]
    fn conjugation() {
        assert_eq!(conj(&UnitQuaternion::identity()), UnitQuaternion::identity());
        let a = q(0.7071, 0.7071, 0.0, 0.0);
        assert_eq!(conj(&conj(&a)), a);
        let c = conj(&a).to_array();
        assert!((c[0] - a.w()).abs() < 1e-15 && (c[1] + a.vec().x).abs() < 1e-15);
    }

    #[test]
    fn log_exp_hand_values() {
        assert_eq!(qlog(&UnitQuaternion::identity()).unwrap(), Tangent3::zeros());
        let z = qlog(&q(0.0, 1.0, 0.0, 0.0)).unwrap();
        assert!((z - Tangent3::new(PI / 2.0, 0.0, 0.0)).norm() < 1e-15);
        assert_eq!(qexp(&Tangent3::zeros()).unwrap(), UnitQuaternion::identity());
        let e = qexp(&Tangent3::new(PI / 2.0, 0.0, 0.0)).unwrap();
        assert!(close(&e, &q(0.0, 1.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn log_rejects_antipode() {
        assert!(matches!(qlog(&q(-1.0, 0.0, 0.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(
            qlog(&q(-1.0, 1e-10, 0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(qlog(&q(-1.0, 1e-6, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn exp_rejects_large_tangent() {
        assert!(matches!(
            qexp(&Tangent3::new(PI, 0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(qexp(&Tangent3::new(0.0, PI - 1e-6, 0.0)).is_ok());
    }

    #[test]
    fn distance_values() {
        let a = q(0.2, 0.4, -0.1, 0.8);
        assert!(quat_distance(&a, &a) < 1e-7);
        assert_eq!(quat_distance(&a, &-a), 2.0 * PI);
        let d = quat_distance(&UnitQuaternion::identity(), &q(0.0, 1.0, 0.0, 0.0));
        assert!((d - PI).abs() < 1e-15);
    }

    #[test]
    fn omega_integration() {
        let a = q(0.5, 0.5, -0.5, 0.5);
        let same = integrate_omega(&a, &AngularVelocity::zeros(), 0.1).unwrap();
        assert!(close(&same, &a, 1e-15));
        let r = integrate_omega(
            &UnitQuaternion::identity(),
            &AngularVelocity::new(PI, 0.0, 0.0),
            1.0,
        )
        .unwrap();
        assert!(close(&r, &q(0.0, 1.0, 0.0, 0.0), 1e-15));
        assert_eq!(
            differentiate_omega(&a, &a, 0.1).unwrap(),
            AngularVelocity::zeros()
        );
        assert!(integrate_omega(&a, &AngularVelocity::zeros(), 0.0).is_err());
    }

    #[test]
    fn constant_increment_gives_constant_omega() {
        let delta = Tangent3::new(0.01, -0.02, 0.005);
        let qa = q(0.9, 0.1, 0.3, -0.2);
        let dt = 0.05;
        let seq: Vec<_> = (0..20)
            .map(|n| qexp(&(delta * n as f64)).unwrap().prod(&qa))
            .collect();
        for pair in seq.windows(2) {
            let w = differentiate_omega(&pair[0], &pair[1], dt).unwrap();
            assert!((w - delta * (2.0 / dt)).norm() < 1e-12);
        }
    }

    fn arb_quat() -> impl Strategy<Value = UnitQuaternion> {
        (
            -1.0f64..1.0,
            -1.0f64..1.0,
            -1.0f64..1.0,
            -1.0f64..1.0,
        )
            .prop_filter_map("nonzero", |(w, x, y, z)| {
                let n = (w * w + x * x + y * y + z * z).sqrt();
                (n > 1e-3).then(|| UnitQuaternion::new(w, x, y, z).unwrap())
            })
    }

    fn arb_tangent(radius: f64) -> impl Strategy<Value = Tangent3> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..1.0).prop_filter_map(
            "nonzero direction",
            move |(x, y, z, r)| {
                let d = Tangent3::new(x, y, z);
                (d.norm() > 1e-6).then(|| d.normalize() * (r * radius))
            },
        )
    }

    proptest! {
        #[test]
        fn products_stay_unit(a in arb_quat(), b in arb_quat()) {
            prop_assert!((a.prod(&b).norm() - 1.0).abs() < 1e-12);
            prop_assert!((a.conj().norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn distance_is_symmetric_and_left_invariant(
            a in arb_quat(), b in arb_quat(), r in arb_quat()
        ) {
            let d = quat_distance(&a, &b);
            prop_assert!((d - quat_distance(&b, &a)).abs() < 1e-9);
            prop_assert!((d - quat_distance(&r.prod(&a), &r.prod(&b))).abs() < 1e-9);
            prop_assert!((0.0..=2.0 * PI).contains(&d));
        }

        #[test]
        fn log_exp_round_trip(z in arb_tangent(PI - 1e-3)) {
            let back = qlog(&qexp(&z).unwrap()).unwrap();
            prop_assert!((back - z).norm() < 1e-9);
        }

        #[test]
        fn omega_round_trip(
            a in arb_quat(),
            w in arb_tangent(3.0),
            dt in 0.001f64..0.5
        ) {
            let next = integrate_omega(&a, &w, dt).unwrap();
            let back = differentiate_omega(&a, &next, dt).unwrap();
            prop_assert!((back - w).norm() < 1e-9);
        }
    }
}
