//! Coefficient domains: the rationals and word-sized prime fields.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::primes::is_prime;
use crate::error::AlgebraError;

/// A field given as a context object; elements are plain values.
///
/// Keeping the modulus in the context (instead of in every element) lets
/// polynomials over `F_p` store bare `u64` coefficients.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn format_elem(&self, a: &Self::Elem) -> String;
    /// Short tag used in error messages and file headers.
    fn domain_name(&self) -> String;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// The field of rational numbers, backed by `BigRational`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn format_elem(&self, a: &BigRational) -> String {
        format_rational(a)
    }
    fn domain_name(&self) -> String {
        "QQ".to_string()
    }
}

/// `num/den` without a trailing `/1`.
pub fn format_rational(a: &BigRational) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

/// Parses `"-12"` or `"7/3"`.
pub fn parse_rational(s: &str) -> Result<BigRational, AlgebraError> {
    let s = s.trim();
    let bad = || AlgebraError::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// The prime field `F_p` for a prime `2^31 < p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub const MIN_MODULUS: u64 = 1 << 31;
    pub const MAX_MODULUS: u64 = 1 << 63;

    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if p <= Self::MIN_MODULUS || p >= Self::MAX_MODULUS {
            return Err(AlgebraError::InvalidModulus(p, "outside (2^31, 2^63)"));
        }
        if !is_prime(p) {
            return Err(AlgebraError::InvalidModulus(p, "not prime"));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_bigint(&self, v: &BigInt) -> u64 {
        let r = v % BigInt::from(self.p);
        let r = if r.is_negative() { r + BigInt::from(self.p) } else { r };
        r.to_u64().expect("residue fits in u64")
    }

    /// Image of a rational number; `None` when `p` divides the denominator.
    pub fn reduce_rational(&self, v: &BigRational) -> Option<u64> {
        let den = self.reduce_bigint(v.denom());
        let den_inv = self.inv(&den)?;
        Some(mul_mod(self.reduce_bigint(v.numer()), den_inv, self.p))
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn to_signed(&self, a: u64) -> i128 {
        if a > self.p / 2 {
            a as i128 - self.p as i128
        } else {
            a as i128
        }
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    if s >= p as u128 {
        (s - p as u128) as u64
    } else {
        s as u64
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse modulo a prime via Fermat; `None` for zero.
#[inline]
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i64(v)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.p)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.p)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        inv_mod(*a, self.p)
    }
    fn format_elem(&self, a: &u64) -> String {
        self.to_signed(*a).to_string()
    }
    fn domain_name(&self) -> String {
        format!("GF({})", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 4_611_686_018_427_388_039; // 2^62 + 135, prime

    #[test]
    fn prime_field_rejects_bad_moduli() {
        assert!(PrimeField::new(7).is_err());
        assert!(PrimeField::new(P + 2).is_err());
        assert!(PrimeField::new(P).is_ok());
    }

    #[test]
    fn inverse_and_signed_repr() {
        let f = PrimeField::new(P).unwrap();
        let a = f.from_i64(-5);
        assert_eq!(f.to_signed(a), -5);
        let ai = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &ai), 1);
        assert_eq!(f.inv(&0), None);
    }

    #[test]
    fn rational_reduction() {
        let f = PrimeField::new(P).unwrap();
        let half = parse_rational("1/2").unwrap();
        let h = f.reduce_rational(&half).unwrap();
        assert_eq!(f.mul(&h, &2), 1);
        assert_eq!(parse_rational("6/4").unwrap(), parse_rational("3/2").unwrap());
        assert!(parse_rational("1/0").is_err());
    }
}
