//! Sparse multivariate polynomials in canonical form.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use super::field::{Field, PrimeField, Rationals};
use super::monomial::Monomial;
use super::order::VariableOrder;
use crate::error::AlgebraError;

/// Sparse polynomial: nonzero terms in strictly descending grevlex order.
#[derive(Clone)]
pub struct Polynomial<F: Field> {
    field: F,
    vars: Arc<VariableOrder>,
    terms: Vec<(Monomial, F::Elem)>,
}

/// Outcome of dividing by a single polynomial.
#[derive(Clone, Debug)]
pub enum Division<F: Field> {
    Exact(Polynomial<F>),
    /// Leading term of the nonzero remainder.
    NotDivisible(Monomial, F::Elem),
}

impl<F: Field> Polynomial<F> {
    pub fn zero(field: F, vars: Arc<VariableOrder>) -> Self {
        Polynomial {
            field,
            vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(field: F, vars: Arc<VariableOrder>, c: F::Elem) -> Self {
        Self::monomial(field, vars, c, Monomial::ONE)
    }

    pub fn monomial(field: F, vars: Arc<VariableOrder>, c: F::Elem, m: Monomial) -> Self {
        let terms = if field.is_zero(&c) { Vec::new() } else { vec![(m, c)] };
        Polynomial { field, vars, terms }
    }

    pub fn variable(field: F, vars: Arc<VariableOrder>, index: usize) -> Self {
        assert!(index < vars.len(), "variable index {index} out of range");
        let one = field.one();
        Self::monomial(field, vars, one, Monomial::variable(index))
    }

    /// Builds a canonical polynomial from arbitrary terms (merging duplicates).
    pub fn from_terms(
        field: F,
        vars: Arc<VariableOrder>,
        terms: impl IntoIterator<Item = (Monomial, F::Elem)>,
    ) -> Self {
        let mut acc: HashMap<Monomial, F::Elem> = HashMap::new();
        for (m, c) in terms {
            debug_assert!(m.support().all(|v| v < vars.len()));
            match acc.get_mut(&m) {
                Some(slot) => *slot = field.add(slot, &c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(field, vars, acc)
    }

    fn from_map(field: F, vars: Arc<VariableOrder>, acc: HashMap<Monomial, F::Elem>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { field, vars, terms }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &Arc<VariableOrder> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_term(&self) -> Option<&(Monomial, F::Elem)> {
        self.terms.first()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m0, _)) => self.terms.iter().all(|(m, _)| m.degree() == m0.degree()),
        }
    }

    /// Coefficient of `m` (zero when absent).
    pub fn coefficient(&self, m: &Monomial) -> F::Elem {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| self.field.zero())
    }

    fn compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.field != other.field {
            return Err(AlgebraError::DomainMismatch(
                self.field.domain_name(),
                other.field.domain_name(),
            ));
        }
        if !Arc::ptr_eq(&self.vars, &other.vars) && self.vars != other.vars {
            return Err(AlgebraError::OrderMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.compatible(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.compatible(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let f = &self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                std::cmp::Ordering::Greater => {
                    out.push((*ma, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((*mb, if negate { f.neg(cb) } else { cb.clone() }));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { f.sub(ca, cb) } else { f.add(ca, cb) };
                    if !f.is_zero(&c) {
                        out.push((*ma, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(
            other.terms[j..]
                .iter()
                .map(|(m, c)| (*m, if negate { f.neg(c) } else { c.clone() })),
        );
        Polynomial {
            field: self.field.clone(),
            vars: self.vars.clone(),
            terms: out,
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field.clone(), self.vars.clone());
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        let f = &self.field;
        let mut acc: HashMap<Monomial, F::Elem> = HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = f.mul(ca, cb);
                let m = ma.mul(mb);
                match acc.get_mut(&m) {
                    Some(slot) => *slot = f.add(slot, &prod),
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }
        Self::from_map(self.field.clone(), self.vars.clone(), acc)
    }

    /// Multiplies by the single term `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &F::Elem) -> Self {
        let f = &self.field;
        if f.is_zero(c) {
            return Self::zero(f.clone(), self.vars.clone());
        }
        // monomial multiplication preserves the order
        let terms = self.terms.iter().map(|(t, a)| (t.mul(m), f.mul(a, c))).collect();
        Polynomial {
            field: f.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        self.mul_term(&Monomial::ONE, c)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Polynomial {
            field: f.clone(),
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, f.neg(c))).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.field.clone(), self.vars.clone(), self.field.one());
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `v`.
    pub fn partial_derivative(&self, v: usize) -> Self {
        assert!(v < self.nvars(), "variable index {v} out of range");
        let f = &self.field;
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.lower(v) {
                let coef = f.mul(c, &f.from_i64(e as i64));
                if !f.is_zero(&coef) {
                    terms.push((lowered, coef));
                }
            }
        }
        // lowering one fixed variable keeps the relative grevlex order
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        Polynomial {
            field: f.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    /// Single-divisor reduction of `self` by `divisor` under grevlex.
    ///
    /// A principal ideal is its own Groebner basis, so a nonzero remainder
    /// means `divisor` does not divide `self`.
    pub fn divide(&self, divisor: &Self) -> Result<Division<F>, AlgebraError> {
        self.compatible(divisor)?;
        let (lm, lc) = divisor.leading_term().ok_or(AlgebraError::DivisionByZero)?;
        let f = &self.field;
        let lc_inv = f.inv(lc).expect("nonzero leading coefficient");
        let mut rest: BTreeMap<Reverse<Monomial>, F::Elem> =
            self.terms.iter().map(|(m, c)| (Reverse(*m), c.clone())).collect();
        let mut quotient = Vec::new();
        while let Some((Reverse(m), c)) = rest.pop_first() {
            if !lm.divides(&m) {
                return Ok(Division::NotDivisible(m, c));
            }
            let t = lm.quotient_of(&m);
            let q = f.mul(&c, &lc_inv);
            for (dm, dc) in &divisor.terms[1..] {
                let key = Reverse(dm.mul(&t));
                let delta = f.mul(&q, dc);
                match rest.get_mut(&key) {
                    Some(slot) => {
                        *slot = f.sub(slot, &delta);
                        if f.is_zero(slot) {
                            rest.remove(&key);
                        }
                    }
                    None => {
                        rest.insert(key, f.neg(&delta));
                    }
                }
            }
            quotient.push((t, q));
        }
        Ok(Division::Exact(Polynomial {
            field: f.clone(),
            vars: self.vars.clone(),
            terms: quotient,
        }))
    }

    /// `Some(q)` with `self = q * divisor` when the division is exact.
    pub fn exact_divide(&self, divisor: &Self) -> Result<Option<Self>, AlgebraError> {
        Ok(match self.divide(divisor)? {
            Division::Exact(q) => Some(q),
            Division::NotDivisible(..) => None,
        })
    }

    pub fn evaluate(&self, point: &[F::Elem]) -> Result<F::Elem, AlgebraError> {
        if point.len() != self.nvars() {
            return Err(AlgebraError::PointLength {
                expected: self.nvars(),
                got: point.len(),
            });
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m.support() {
                t = f.mul(&t, &f.pow(&point[v], m.exponent(v) as u32));
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Renames variables: variable `i` becomes `perm[i]`.
    pub fn permute_variables(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.nvars());
        Self::from_terms(
            self.field.clone(),
            self.vars.clone(),
            self.terms.iter().map(|(m, c)| (m.permute(perm), c.clone())),
        )
    }

    /// Coefficient-wise image in another field; terms mapping to zero vanish.
    pub fn map_coefficients<G: Field>(
        &self,
        target: G,
        mut map: impl FnMut(&F::Elem) -> Option<G::Elem>,
    ) -> Option<Polynomial<G>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let image = map(c)?;
            if !target.is_zero(&image) {
                terms.push((*m, image));
            }
        }
        Some(Polynomial {
            field: target,
            vars: self.vars.clone(),
            terms,
        })
    }
}

impl Polynomial<Rationals> {
    /// Reduction modulo `p`; `None` when `p` divides some denominator.
    pub fn reduce_mod(&self, p: &PrimeField) -> Option<Polynomial<PrimeField>> {
        self.map_coefficients(*p, |c| p.reduce_rational(c))
    }

    pub fn from_integer_terms(vars: Arc<VariableOrder>, terms: impl IntoIterator<Item = (Monomial, i64)>) -> Self {
        Self::from_terms(
            Rationals,
            vars,
            terms.into_iter().map(|(m, c)| (m, Rationals.from_i64(c))),
        )
    }
}

impl<F: Field> PartialEq for Polynomial<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.terms == other.terms && self.vars.len() == other.vars.len()
    }
}

impl<F: Field> Eq for Polynomial<F> {}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a, F: Field> std::ops::$trait<&'a Polynomial<F>> for &'a Polynomial<F> {
            type Output = Polynomial<F>;
            /// Panics on mismatched domains; use the `checked_*` form to handle that case.
            fn $method(self, rhs: &'a Polynomial<F>) -> Polynomial<F> {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<F: Field> std::ops::$trait for Polynomial<F> {
            type Output = Polynomial<F>;
            fn $method(self, rhs: Polynomial<F>) -> Polynomial<F> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<F: Field> std::ops::Neg for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        Polynomial::neg(self)
    }
}

/// Writes `c*m` style terms, e.g. `-x3*y2*z1 + 5*x1^2`.
pub(crate) fn format_monomial(m: &Monomial, vars: &VariableOrder) -> String {
    let parts: Vec<String> = m
        .support()
        .map(|v| match m.exponent(v) {
            1 => vars.name(v).to_string(),
            e => format!("{}^{}", vars.name(v), e),
        })
        .collect();
    parts.join("*")
}

impl<F: Field> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mut coef = self.field.format_elem(c);
            let negative = coef.starts_with('-');
            if negative {
                coef.remove(0);
            }
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = format_monomial(m, &self.vars);
            match (coef.as_str(), mono.is_empty()) {
                (_, true) => write!(f, "{coef}")?,
                ("1", false) => write!(f, "{mono}")?,
                (_, false) => write!(f, "{coef}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.field.domain_name(), self)
    }
}
