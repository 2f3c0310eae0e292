//! Chinese remaindering and rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::AlgebraError;

/// Combines `(residue, modulus)` pairs into `(value, lcm)` with `0 <= value < lcm`.
///
/// Moduli need not be coprime, but residues must then agree on the shared
/// factors.
pub fn crt(residues: &[(u64, u64)]) -> Result<(BigInt, BigInt), AlgebraError> {
    let mut value = BigInt::zero();
    let mut modulus = BigInt::one();
    for &(r, m) in residues {
        if m == 0 {
            return Err(AlgebraError::InconsistentResidues("zero modulus".into()));
        }
        let (r, m) = (BigInt::from(r % m), BigInt::from(m));
        let g = modulus.gcd(&m);
        let diff = &r - &value;
        if !(&diff % &g).is_zero() {
            return Err(AlgebraError::InconsistentResidues(format!(
                "{value} mod {modulus} vs {r} mod {m}"
            )));
        }
        // value + modulus * t ≡ r (mod m)  =>  (modulus/g) t ≡ diff/g (mod m/g)
        let m_g = &m / &g;
        let inv = mod_inverse(&(&modulus / &g), &m_g).expect("coprime after dividing out the gcd");
        let t = ((&diff / &g) * inv).mod_floor(&m_g);
        value += &modulus * t;
        modulus *= m_g;
        value = value.mod_floor(&modulus);
    }
    Ok((value, modulus))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Numerator bound `floor(sqrt(M / 2))` used by [`reconstruct`].
pub fn numerator_bound(modulus: &BigInt) -> BigInt {
    (modulus / BigInt::from(2)).sqrt()
}

/// Rational reconstruction of `u mod M`.
///
/// Finds `a/b` with `|a| <= N = floor(sqrt(M/2))`, `0 < b <= D` where
/// `D = floor((M - 1) / (2N))`, `gcd(a, b) = 1` and `a ≡ u b (mod M)`. Since
/// `2ND < M` the answer is unique when it exists.
pub fn reconstruct(u: &BigInt, modulus: &BigInt) -> Option<BigRational> {
    let n_bound = numerator_bound(modulus);
    if n_bound.is_zero() {
        return None;
    }
    let d_bound = (modulus - BigInt::one()) / (BigInt::from(2) * &n_bound);
    let (mut r0, mut r1) = (modulus.clone(), u.mod_floor(modulus));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > n_bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > d_bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// CRT followed by rational reconstruction; `Ok(None)` when no fraction fits
/// the bounds.
pub fn lift_rational(residues: &[(u64, u64)]) -> Result<Option<BigRational>, AlgebraError> {
    let (value, modulus) = crt(residues)?;
    Ok(reconstruct(&value, &modulus))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1: u64 = 4_611_686_018_427_388_039;
    const P2: u64 = 2_305_843_009_213_693_951;

    fn residue(v: i64, den: i64, p: u64) -> u64 {
        let pb = BigInt::from(p);
        let num = BigInt::from(v).mod_floor(&pb);
        let inv = mod_inverse(&BigInt::from(den), &pb).unwrap();
        u64::try_from((num * inv).mod_floor(&pb)).unwrap()
    }

    #[test]
    fn integer_crt() {
        let (v, m) = crt(&[(2, 3), (3, 5)]).unwrap();
        assert_eq!(v, BigInt::from(8));
        assert_eq!(m, BigInt::from(15));
    }

    #[test]
    fn half_mod_seven() {
        let r = lift_rational(&[(4, 7)]).unwrap().unwrap();
        assert_eq!(r, BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn constant_from_two_large_primes() {
        let res = [(residue(9375, 1, P1), P1), (residue(9375, 1, P2), P2)];
        assert_eq!(
            lift_rational(&res).unwrap().unwrap(),
            BigRational::from_integer(9375.into())
        );
        let neg = [(residue(-23328, 7, P1), P1), (residue(-23328, 7, P2), P2)];
        assert_eq!(
            lift_rational(&neg).unwrap().unwrap(),
            BigRational::new((-23328).into(), 7.into())
        );
    }

    #[test]
    fn inconsistent_shared_factor() {
        assert!(crt(&[(1, 6), (2, 4)]).is_err());
        let (v, m) = crt(&[(1, 6), (3, 4)]).unwrap();
        assert_eq!((v, m), (BigInt::from(7), BigInt::from(12)));
    }

    #[test]
    fn out_of_bounds_is_absent() {
        let big = BigRational::new(BigInt::from(1u64 << 40), BigInt::from(3));
        let res = [(residue(1 << 40, 3, 1_000_003), 1_000_003)];
        assert_ne!(lift_rational(&res).unwrap(), Some(big));
    }
}
