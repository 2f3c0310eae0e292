//! Polynomial derivations `θ = Σ a_u ∂_u` and tangency to an arrangement.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{Division, Field, Monomial, Polynomial, PrimeField, QPoly, Rationals, VariableOrder};
use crate::error::ModelError;

use super::arrangement::Arrangement;

/// A derivation whose nonzero coefficients are homogeneous of one degree.
#[derive(Clone, PartialEq, Eq)]
pub struct Derivation<F: Field> {
    coefficients: Vec<Polynomial<F>>,
    degree: Option<u32>,
}

pub type QDerivation = Derivation<Rationals>;

impl<F: Field> Derivation<F> {
    pub fn new(coefficients: Vec<Polynomial<F>>) -> Result<Self, ModelError> {
        let Some(first) = coefficients.first() else {
            return Err(ModelError::CoefficientCount { expected: 1, got: 0 });
        };
        let nvars = first.nvars();
        if coefficients.len() != nvars {
            return Err(ModelError::CoefficientCount {
                expected: nvars,
                got: coefficients.len(),
            });
        }
        let mut degree = None;
        for a in coefficients.iter().filter(|a| !a.is_zero()) {
            if !a.is_homogeneous() {
                return Err(ModelError::NotHomogeneous);
            }
            let d = a.degree();
            match degree {
                None => degree = d,
                Some(prev) if Some(prev) != d => return Err(ModelError::NotHomogeneous),
                _ => {}
            }
        }
        Ok(Derivation { coefficients, degree })
    }

    pub fn coefficients(&self) -> &[Polynomial<F>] {
        &self.coefficients
    }

    pub fn coefficient(&self, var: usize) -> &Polynomial<F> {
        &self.coefficients[var]
    }

    /// Common degree of the coefficients; `None` for the zero derivation.
    pub fn degree(&self) -> Option<u32> {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.degree.is_none()
    }

    pub fn vars(&self) -> &Arc<VariableOrder> {
        self.coefficients[0].vars()
    }

    /// `θ(g) = Σ_u a_u ∂_u g`.
    pub fn apply(&self, g: &Polynomial<F>) -> Polynomial<F> {
        let mut acc = Polynomial::zero(g.field().clone(), g.vars().clone());
        for (u, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let dg = g.partial_derivative(u);
            if !dg.is_zero() {
                acc = &acc + &(a * &dg);
            }
        }
        acc
    }

    /// Per-factor test `θ(f_i) ∈ f_i · S`; cofactors are re-checked by
    /// multiplication before being returned.
    pub fn tangency(
        &self,
        arr: &Arrangement,
        factors: &[Polynomial<F>],
    ) -> Result<CofactorCertificate<F>, TangencyFailure<F>> {
        let mut cofactors = Vec::with_capacity(factors.len());
        for (i, f) in factors.iter().enumerate() {
            let image = self.apply(f);
            match image.divide(f).expect("compatible and nonzero factor") {
                Division::Exact(q) => {
                    debug_assert!(&q * f == image);
                    cofactors.push(q);
                }
                Division::NotDivisible(m, c) => {
                    return Err(TangencyFailure {
                        factor_index: i,
                        label: arr.labels()[i].id(),
                        leading_monomial: m,
                        leading_coefficient: c,
                    })
                }
            }
        }
        Ok(CofactorCertificate { cofactors })
    }

    /// Renames variables by `perm` (variable `i` becomes `perm[i]`),
    /// transporting `∂_i` to `∂_{perm[i]}`.
    pub fn permute_variables(&self, perm: &[usize]) -> Self {
        let mut coefficients =
            vec![Polynomial::zero(self.coefficients[0].field().clone(), self.vars().clone()); perm.len()];
        for (i, a) in self.coefficients.iter().enumerate() {
            coefficients[perm[i]] = a.permute_variables(perm);
        }
        Derivation {
            coefficients,
            degree: self.degree,
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        Derivation {
            degree: if self.coefficients[0].field().is_zero(c) {
                None
            } else {
                self.degree
            },
            coefficients: self.coefficients.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// Leading coefficient of the first nonzero coefficient polynomial.
    pub fn first_nonzero(&self) -> Option<&F::Elem> {
        self.coefficients.iter().find_map(|a| a.leading_term().map(|(_, c)| c))
    }

    /// Scaled so that [`Self::first_nonzero`] is one.
    pub fn normalized(&self) -> Self {
        match self.first_nonzero() {
            None => self.clone(),
            Some(c) => {
                let inv = self.coefficients[0].field().inv(c).expect("nonzero");
                self.scale(&inv)
            }
        }
    }

    /// Number of nonzero terms over all coefficients.
    pub fn term_count(&self) -> usize {
        self.coefficients.iter().map(Polynomial::len).sum()
    }
}

impl QDerivation {
    /// The Euler derivation `E = Σ x_u ∂_u`.
    pub fn euler(vars: &Arc<VariableOrder>) -> Self {
        let coefficients = (0..vars.len())
            .map(|u| QPoly::variable(Rationals, vars.clone(), u))
            .collect();
        Derivation::new(coefficients).expect("homogeneous")
    }

    /// Constant derivation `∂_u`.
    pub fn coordinate(vars: &Arc<VariableOrder>, u: usize) -> Self {
        let coefficients = (0..vars.len())
            .map(|v| {
                if v == u {
                    QPoly::constant(Rationals, vars.clone(), Rationals.one())
                } else {
                    QPoly::zero(Rationals, vars.clone())
                }
            })
            .collect();
        Derivation::new(coefficients).expect("homogeneous")
    }

    pub fn reduce_mod(&self, p: &PrimeField) -> Option<Derivation<PrimeField>> {
        let coefficients = self
            .coefficients
            .iter()
            .map(|a| a.reduce_mod(p))
            .collect::<Option<Vec<_>>>()?;
        Derivation::new(coefficients).ok()
    }

    /// Exact tangency over the rationals against the arrangement's minors.
    pub fn tangent_to(&self, arr: &Arrangement) -> Result<CofactorCertificate<Rationals>, TangencyFailure<Rationals>> {
        self.tangency(arr, arr.factors())
    }

    /// `(variable, monomial, coefficient)` triples in variable order.
    pub fn triples(&self) -> Vec<(usize, Monomial, num_rational::BigRational)> {
        self.coefficients
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.terms().iter().map(move |(m, c)| (u, *m, c.clone())))
            .collect()
    }

    pub fn from_triples(
        vars: &Arc<VariableOrder>,
        triples: impl IntoIterator<Item = (usize, Monomial, num_rational::BigRational)>,
    ) -> Result<Self, ModelError> {
        let mut per_var: Vec<Vec<(Monomial, num_rational::BigRational)>> = vec![Vec::new(); vars.len()];
        for (u, m, c) in triples {
            if u >= vars.len() {
                return Err(ModelError::BasisData(format!("variable index {u} out of range")));
            }
            per_var[u].push((m, c));
        }
        Derivation::new(
            per_var
                .into_iter()
                .map(|t| QPoly::from_terms(Rationals, vars.clone(), t))
                .collect(),
        )
    }
}

/// Quotients `g_i` with `θ(f_i) = g_i f_i`.
#[derive(Clone, Debug)]
pub struct CofactorCertificate<F: Field> {
    pub cofactors: Vec<Polynomial<F>>,
}

/// First factor for which `θ(f_i)` is not a multiple of `f_i`.
#[derive(Clone, Debug)]
pub struct TangencyFailure<F: Field> {
    pub factor_index: usize,
    pub label: usize,
    pub leading_monomial: Monomial,
    pub leading_coefficient: F::Elem,
}

impl<F: Field> fmt::Display for TangencyFailure<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "θ(f{}) is not divisible by f{} (remainder leading monomial {:?}, coefficient {:?})",
            self.label, self.label, self.leading_monomial, self.leading_coefficient
        )
    }
}

impl<F: Field> fmt::Display for Derivation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (u, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*d{}", a, a.vars().name(u))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Derivation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation[{}]", self)
    }
}
