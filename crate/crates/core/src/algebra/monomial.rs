//! Packed monomials under graded reverse lexicographic order.

use std::cmp::Ordering;
use std::fmt;

/// Largest supported number of variables (a 3x5 generic matrix).
pub const MAX_VARS: usize = 15;

/// Exponent vector with one byte per variable and a cached total degree.
///
/// Variables past the ring's variable count are always zero, so monomials of
/// rings with fewer variables still compare consistently.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u8; MAX_VARS],
    degree: u16,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        exps: [0; MAX_VARS],
        degree: 0,
    };

    pub fn from_exponents(exps: &[u8]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut m = Monomial::ONE;
        for (i, &e) in exps.iter().enumerate() {
            m.exps[i] = e;
            m.degree += e as u16;
        }
        m
    }

    pub fn variable(index: usize) -> Monomial {
        let mut m = Monomial::ONE;
        m.exps[index] = 1;
        m.degree = 1;
        m
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree as u32
    }

    #[inline]
    pub fn exponent(&self, var: usize) -> u8 {
        self.exps[var]
    }

    pub fn exponents(&self, nvars: usize) -> &[u8] {
        &self.exps[..nvars]
    }

    /// Indices of variables with a positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i].checked_add(other.exps[i]).expect("exponent overflow");
        }
        Monomial {
            exps,
            degree: self.degree + other.degree,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut exps = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = other.exps[i] - self.exps[i];
        }
        Monomial {
            exps,
            degree: other.degree - self.degree,
        }
    }

    /// Drops one power of `var`; `None` when `var` is absent.
    pub fn lower(&self, var: usize) -> Option<(u8, Monomial)> {
        let e = self.exps[var];
        if e == 0 {
            return None;
        }
        let mut m = *self;
        m.exps[var] -= 1;
        m.degree -= 1;
        Some((e, m))
    }

    /// Applies a variable permutation: exponent of `i` moves to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Monomial {
        let mut m = Monomial::ONE;
        for (i, &target) in perm.iter().enumerate() {
            m.exps[target] = self.exps[i];
        }
        m.degree = self.degree;
        m
    }
}

impl Ord for Monomial {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree.cmp(&other.degree) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // grevlex: the smaller exponent in the last differing variable wins
        for i in (0..MAX_VARS).rev() {
            match self.exps[i].cmp(&other.exps[i]) {
                Ordering::Equal => continue,
                ord => return ord.reverse(),
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e > 0).map_or(0, |i| i + 1);
        write!(f, "Monomial({:?})", &self.exps[..last])
    }
}

/// Number of monomials of degree `d` in `nvars` variables, `C(d + n - 1, n - 1)`.
pub fn monomial_count(nvars: usize, d: usize) -> usize {
    if nvars == 0 {
        return usize::from(d == 0);
    }
    binomial(d + nvars - 1, nvars - 1)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All monomials of degree `d` in `nvars` variables, descending grevlex.
pub fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
    assert!(nvars <= MAX_VARS);
    let mut out = Vec::with_capacity(monomial_count(nvars, d));
    let mut exps = [0u8; MAX_VARS];
    fill(&mut out, &mut exps, 0, nvars, d);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn fill(out: &mut Vec<Monomial>, exps: &mut [u8; MAX_VARS], var: usize, nvars: usize, left: usize) {
    if nvars == 0 {
        if left == 0 {
            out.push(Monomial::ONE);
        }
        return;
    }
    if var + 1 == nvars {
        exps[var] = left as u8;
        out.push(Monomial::from_exponents(&exps[..nvars]));
        exps[var] = 0;
        return;
    }
    for e in 0..=left {
        exps[var] = e as u8;
        fill(out, exps, var + 1, nvars, left - e);
    }
    exps[var] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomials() {
        let expected = [1, 15, 120, 680, 3060, 11628, 38760];
        for (d, &n) in expected.iter().enumerate() {
            assert_eq!(monomials_of_degree(15, d).len(), n);
            assert_eq!(monomial_count(15, d), n);
        }
    }

    #[test]
    fn grevlex_orders_degree_one_by_index() {
        let list = monomials_of_degree(15, 1);
        let first: Vec<usize> = list.iter().map(|m| m.support().next().unwrap()).collect();
        assert_eq!(first, (0..15).collect::<Vec<_>>());
    }

    #[test]
    fn grevlex_small_example() {
        // in k[a,b,c]: a^2 > ab > b^2 > ac > bc > c^2
        let m = |e: [u8; 3]| Monomial::from_exponents(&e);
        let list = monomials_of_degree(3, 2);
        assert_eq!(
            list,
            vec![
                m([2, 0, 0]),
                m([1, 1, 0]),
                m([0, 2, 0]),
                m([1, 0, 1]),
                m([0, 1, 1]),
                m([0, 0, 2])
            ]
        );
    }

    #[test]
    fn divisibility_and_quotient() {
        let a = Monomial::from_exponents(&[1, 2, 0]);
        let b = Monomial::from_exponents(&[2, 3, 1]);
        assert!(a.divides(&b));
        assert!(!b.divides(&a));
        assert_eq!(a.mul(&a.quotient_of(&b)), b);
    }
}
