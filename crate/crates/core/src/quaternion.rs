//! Hamilton quaternions and their embedding as real 4-columns.
//!
//! Components are always ordered `(scalar, i, j, k)`. Every real matrix in
//! this crate acts on columns laid out in that order, so this ordering is the
//! single convention the translation tables depend on.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use nalgebra::Vector4;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// `q0 + q1 i + q2 j + q3 k`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Quaternion { q0, q1, q2, q3 }
    }

    pub const fn real(r: f64) -> Self {
        Quaternion::new(r, 0.0, 0.0, 0.0)
    }

    /// `re + im·i`, the embedding of ℂ used throughout.
    pub const fn complex(re: f64, im: f64) -> Self {
        Quaternion::new(re, im, 0.0, 0.0)
    }

    /// Basis element `e_μ` of `(1, i, j, k)`.
    pub fn basis(mu: usize) -> Self {
        match mu {
            0 => Self::ONE,
            1 => Self::I,
            2 => Self::J,
            3 => Self::K,
            _ => panic!("quaternion basis index {mu} out of range"),
        }
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }

    pub fn to_column(self) -> Vector4<f64> {
        Vector4::new(self.q0, self.q1, self.q2, self.q3)
    }

    pub fn from_column(c: &Vector4<f64>) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::Domain(format!("quaternion {self} has no inverse")));
        }
        Ok(self.conj() / n2)
    }

    /// Euclidean inner product of the component vectors.
    pub fn dot(self, other: Self) -> f64 {
        self.q0 * other.q0 + self.q1 * other.q1 + self.q2 * other.q2 + self.q3 * other.q3
    }

    pub fn vector_part(self) -> Self {
        Quaternion::new(0.0, self.q1, self.q2, self.q3)
    }

    /// Quaternion exponential `e^{q0}(cos|v| + v̂ sin|v|)`.
    pub fn exp(self) -> Self {
        let v = self.vector_part();
        let theta = v.norm();
        let scale = self.q0.exp();
        if theta == 0.0 {
            return Quaternion::real(scale);
        }
        let s = theta.sin() / theta;
        Quaternion::real(scale * theta.cos()) + v * (scale * s)
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self - other)
            .to_array()
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.q0 + o.q0, self.q1 + o.q1, self.q2 + o.q2, self.q3 + o.q3)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.q0 - o.q0, self.q1 - o.q1, self.q2 - o.q2, self.q3 - o.q3)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.q0, -self.q1, -self.q2, -self.q3)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
            a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
            a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
            a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: f64) -> Quaternion {
        Quaternion::new(self.q0 * r, self.q1 * r, self.q2 * r, self.q3 * r)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, r: f64) -> Quaternion {
        Quaternion::new(self.q0 / r, self.q1 / r, self.q2 / r, self.q3 / r)
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

/// Compact form such as `1+2i-3j+4k`, parseable by
/// [`parse_quaternion`](crate::parser::parse_quaternion).
impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (value, unit) in self.to_array().into_iter().zip(["", "i", "j", "k"]) {
            if value == 0.0 {
                continue;
            }
            if wrote {
                f.write_str(if value < 0.0 { "-" } else { "+" })?;
            } else if value < 0.0 {
                f.write_str("-")?;
            }
            let mag = value.abs();
            if unit.is_empty() || mag != 1.0 {
                write!(f, "{mag}")?;
            }
            f.write_str(unit)?;
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Accepts either `{"q0":…,"q1":…,"q2":…,"q3":…}` or a compact string.
impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
            Object {
                #[serde(default)]
                q0: f64,
                #[serde(default)]
                q1: f64,
                #[serde(default)]
                q2: f64,
                #[serde(default)]
                q3: f64,
            },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => crate::parser::parse_quaternion(&s).map_err(serde::de::Error::custom),
            Repr::Number(r) => Ok(Quaternion::real(r)),
            Repr::Object { q0, q1, q2, q3 } => Ok(Quaternion::new(q0, q1, q2, q3)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E: [Quaternion; 4] = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];

    #[test]
    fn defining_relations() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        for u in [Quaternion::I, Quaternion::J, Quaternion::K] {
            assert_eq!(u * u, -Quaternion::ONE);
        }
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, -Quaternion::ONE);
    }

    #[test]
    fn full_hamilton_table() {
        // (sign, index) of e_a · e_b
        let table = [
            [(1, 0), (1, 1), (1, 2), (1, 3)],
            [(1, 1), (-1, 0), (1, 3), (-1, 2)],
            [(1, 2), (-1, 3), (-1, 0), (1, 1)],
            [(1, 3), (1, 2), (-1, 1), (-1, 0)],
        ];
        for a in 0..4 {
            for b in 0..4 {
                let (s, c) = table[a][b];
                assert_eq!(E[a] * E[b], E[c] * s as f64, "e{a}·e{b}");
            }
        }
    }

    #[test]
    fn product_expansion() {
        let lhs = (Quaternion::ONE + Quaternion::I) * (Quaternion::ONE + Quaternion::J);
        assert_eq!(lhs, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn column_embedding() {
        assert_eq!(Quaternion::ONE.to_column(), Vector4::new(1.0, 0.0, 0.0, 0.0));
        let q = Quaternion::I - 2.0 * Quaternion::J;
        assert_eq!(q.to_column(), Vector4::new(0.0, 1.0, -2.0, 0.0));
        assert_eq!(Quaternion::from_column(&q.to_column()), q);
    }

    #[test]
    fn conj_and_inverse() {
        assert_eq!((Quaternion::I + Quaternion::J).conj(), -Quaternion::I - Quaternion::J);
        assert_eq!(Quaternion::real(2.0).inverse().unwrap(), Quaternion::real(0.5));
        let q = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        let inv = q.inverse().unwrap();
        assert_eq!(inv, Quaternion::new(1.0, -1.0, -1.0, -1.0) / 4.0);
        assert!((q * inv).max_abs_diff(Quaternion::ONE) < 1e-15);
        assert!(matches!(Quaternion::ZERO.inverse(), Err(Error::Domain(_))));
    }

    #[test]
    fn exponential_of_pure_imaginary() {
        let e = (Quaternion::I * std::f64::consts::FRAC_PI_2).exp();
        assert!(e.max_abs_diff(Quaternion::I) < 1e-15);
        let e = Quaternion::new(1.0, 0.0, 0.0, 0.0).exp();
        assert!((e.q0 - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Quaternion::new(1.0, 2.0, -3.0, 4.0).to_string(), "1+2i-3j+4k");
        assert_eq!(Quaternion::J.to_string(), "j");
        assert_eq!((-Quaternion::K).to_string(), "-k");
        assert_eq!(Quaternion::ZERO.to_string(), "0");
        assert_eq!(Quaternion::new(0.0, -0.5, 0.0, 0.0).to_string(), "-0.5i");
    }

    #[test]
    fn json_forms() {
        let q: Quaternion = serde_json::from_str(r#"{"q0":1,"q1":2,"q2":3,"q3":4}"#).unwrap();
        assert_eq!(q, Quaternion::new(1.0, 2.0, 3.0, 4.0));
        let q: Quaternion = serde_json::from_str(r#""1+2i-3j+4k""#).unwrap();
        assert_eq!(q, Quaternion::new(1.0, 2.0, -3.0, 4.0));
        let s = serde_json::to_string(&Quaternion::K).unwrap();
        assert_eq!(s, r#"{"q0":0.0,"q1":0.0,"q2":0.0,"q3":1.0}"#);
        assert!(serde_json::from_str::<Quaternion>(r#""1+x""#).is_err());
    }

    fn small() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-5.0f64..5.0).prop_map(Quaternion::from_array)
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in small(), b in small()) {
            let lhs = (a * b).norm();
            let rhs = a.norm() * b.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn associative(a in small(), b in small(), c in small()) {
            let d = ((a * b) * c).max_abs_diff(a * (b * c));
            prop_assert!(d <= 1e-12 * (1.0 + a.norm() * b.norm() * c.norm()));
        }

        #[test]
        fn conj_product_is_norm(a in small()) {
            let p = a * a.conj();
            prop_assert!(p.max_abs_diff(Quaternion::real(a.norm_sqr())) <= 1e-12 * (1.0 + a.norm_sqr()));
        }

        #[test]
        fn display_roundtrips(a in small()) {
            let back = crate::parser::parse_quaternion(&a.to_string()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
