//! Exact arithmetic in prime fields GF(p).
//!
//! A [`FieldSpec`] is a validated prime modulus; a [`Scalar`] is a reduced
//! representative carrying its field, so mixed-field operations are caught
//! at runtime instead of silently producing garbage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime field GF(p), identified by its modulus.
///
/// Primality is checked once at construction by trial division; moduli up
/// to 2^31 are supported, which keeps every product inside `u128` with room
/// to spare.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FieldSpec {
    p: u64,
}

impl FieldSpec {
    pub const MAX_MODULUS: u64 = 1 << 31;

    pub fn new(p: u64) -> Result<Self> {
        if p > Self::MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec { p })
    }

    /// GF(2), the default field throughout the crate.
    pub fn gf2() -> Self {
        FieldSpec { p: 2 }
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    /// Embeds an integer, reducing it mod p.
    pub fn element(self, value: u64) -> Scalar {
        Scalar {
            value: value % self.p,
            field: self,
        }
    }

    pub fn zero(self) -> Scalar {
        self.element(0)
    }

    pub fn one(self) -> Scalar {
        self.element(1)
    }

    // Raw operations on reduced representatives. The linear-algebra kernels
    // use these directly; inputs must already be in [0, p).

    #[inline]
    pub(crate) fn add_raw(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p { s - self.p } else { s }
    }

    #[inline]
    pub(crate) fn sub_raw(self, a: u64, b: u64) -> u64 {
        if a >= b { a - b } else { self.p - (b - a) }
    }

    #[inline]
    pub(crate) fn mul_raw(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    #[inline]
    pub(crate) fn neg_raw(self, a: u64) -> u64 {
        if a == 0 { 0 } else { self.p - a }
    }

    /// Inverse of a nonzero reduced representative.
    pub(crate) fn inv_raw(self, a: u64) -> u64 {
        debug_assert!(a != 0 && a < self.p);
        // Extended Euclid on (a, p); coefficients stay within i128.
        let (mut r0, mut r1) = (a as i128, self.p as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1, "inverse of a unit in a prime field");
        (s0.rem_euclid(self.p as i128)) as u64
    }

    fn check_same(self, other: FieldSpec) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::MixedFields(self.p, other.p))
        }
    }
}

impl TryFrom<u64> for FieldSpec {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        FieldSpec::new(p)
    }
}

impl From<FieldSpec> for u64 {
    fn from(f: FieldSpec) -> u64 {
        f.p
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "gf{}", self.p)
    }
}

/// An element of GF(p): a reduced representative plus its field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    value: u64,
    field: FieldSpec,
}

impl Scalar {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn field(self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn add(self, rhs: Scalar) -> Result<Scalar> {
        self.field.check_same(rhs.field)?;
        Ok(Scalar {
            value: self.field.add_raw(self.value, rhs.value),
            field: self.field,
        })
    }

    pub fn sub(self, rhs: Scalar) -> Result<Scalar> {
        self.field.check_same(rhs.field)?;
        Ok(Scalar {
            value: self.field.sub_raw(self.value, rhs.value),
            field: self.field,
        })
    }

    pub fn mul(self, rhs: Scalar) -> Result<Scalar> {
        self.field.check_same(rhs.field)?;
        Ok(Scalar {
            value: self.field.mul_raw(self.value, rhs.value),
            field: self.field,
        })
    }

    pub fn div(self, rhs: Scalar) -> Result<Scalar> {
        self.mul(rhs.inv()?)
    }

    pub fn neg(self) -> Scalar {
        Scalar {
            value: self.field.neg_raw(self.value),
            field: self.field,
        }
    }

    pub fn inv(self) -> Result<Scalar> {
        if self.value == 0 {
            return Err(Error::DivisionByZero(self.field.p));
        }
        Ok(Scalar {
            value: self.field.inv_raw(self.value),
            field: self.field,
        })
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_at_construction() {
        assert!(FieldSpec::new(2).is_ok());
        assert!(FieldSpec::new(3).is_ok());
        assert!(FieldSpec::new(2147483647).is_ok()); // 2^31 - 1, Mersenne
        assert_eq!(FieldSpec::new(1), Err(Error::NotPrime(1)));
        assert_eq!(FieldSpec::new(4), Err(Error::NotPrime(4)));
        assert_eq!(FieldSpec::new(0), Err(Error::NotPrime(0)));
        assert!(matches!(
            FieldSpec::new((1 << 31) + 11),
            Err(Error::ModulusTooLarge(_))
        ));
    }

    #[test]
    fn characteristic_two() {
        let f = FieldSpec::gf2();
        assert_eq!(f.one().add(f.one()).unwrap(), f.zero());
    }

    #[test]
    fn inverse_in_gf5() {
        let f = FieldSpec::new(5).unwrap();
        assert_eq!(f.element(3).inv().unwrap(), f.element(2));
    }

    #[test]
    fn product_in_gf7() {
        let f = FieldSpec::new(7).unwrap();
        assert_eq!(f.element(4).mul(f.element(5)).unwrap(), f.element(6));
    }

    #[test]
    fn every_unit_has_an_inverse() {
        for p in [2u64, 3, 5, 7, 31, 101] {
            let f = FieldSpec::new(p).unwrap();
            for a in 1..p {
                let x = f.element(a);
                assert_eq!(x.mul(x.inv().unwrap()).unwrap(), f.one(), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn zero_has_no_inverse() {
        let f = FieldSpec::new(5).unwrap();
        assert_eq!(f.zero().inv(), Err(Error::DivisionByZero(5)));
        assert_eq!(f.one().div(f.zero()), Err(Error::DivisionByZero(5)));
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = FieldSpec::gf2().one();
        let b = FieldSpec::new(3).unwrap().one();
        assert_eq!(a.add(b), Err(Error::MixedFields(2, 3)));
        assert_eq!(a.mul(b), Err(Error::MixedFields(2, 3)));
    }

    #[test]
    fn subtraction_wraps() {
        let f = FieldSpec::new(7).unwrap();
        assert_eq!(f.element(2).sub(f.element(5)).unwrap(), f.element(4));
        assert_eq!(f.element(3).neg(), f.element(4));
        assert_eq!(f.zero().neg(), f.zero());
    }
}
