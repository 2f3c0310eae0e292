use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::shape::{minor, MatrixShape, MinorLabel};
use crate::algebra::{Field, Monomial, PrimeField, QPoly, Rationals, VariableOrder};
use crate::error::ModelError;

/// A reduced determinantal arrangement `F = f_{i1} ... f_{ik}`, kept in
/// factored form.
#[derive(Clone, Debug)]
pub struct Arrangement {
    shape: MatrixShape,
    vars: Arc<VariableOrder>,
    labels: Vec<MinorLabel>,
    factors: Vec<QPoly>,
}

impl Arrangement {
    pub fn new(shape: MatrixShape, ids: &[usize]) -> Result<Self, ModelError> {
        if ids.is_empty() {
            return Err(ModelError::EmptyArrangement);
        }
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::NotReduced(w[0]));
        }
        let labels = sorted
            .iter()
            .map(|&id| MinorLabel::from_id(shape, id))
            .collect::<Result<Vec<_>, _>>()?;
        let vars = shape.variables();
        let factors = labels.iter().map(|l| minor(shape, l, &vars)).collect();
        Ok(Arrangement {
            shape,
            vars,
            labels,
            factors,
        })
    }

    /// Arrangement in the default `3x5` model.
    pub fn from_ids(ids: &[usize]) -> Result<Self, ModelError> {
        Self::new(MatrixShape::DEFAULT, ids)
    }

    /// All maximal minors of the shape.
    pub fn full(shape: MatrixShape) -> Self {
        let ids: Vec<usize> = (1..=shape.minor_count()).collect();
        Self::new(shape, &ids).expect("valid ids")
    }

    pub fn shape(&self) -> MatrixShape {
        self.shape
    }

    pub fn vars(&self) -> &Arc<VariableOrder> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn labels(&self) -> &[MinorLabel] {
        &self.labels
    }

    pub fn ids(&self) -> Vec<usize> {
        self.labels.iter().map(MinorLabel::id).collect()
    }

    pub fn factors(&self) -> &[QPoly] {
        &self.factors
    }

    /// Degree of the defining polynomial, `m * (number of factors)`.
    pub fn degree(&self) -> usize {
        self.shape.rows() * self.labels.len()
    }

    pub fn column_support(&self) -> BTreeSet<usize> {
        self.labels.iter().flat_map(|l| l.columns().iter().copied()).collect()
    }

    /// Variables occurring in some factor.
    pub fn active_variables(&self) -> BTreeSet<usize> {
        self.factors
            .iter()
            .flat_map(|f| f.terms().iter().flat_map(|(m, _)| m.support().collect::<Vec<_>>()))
            .collect()
    }

    /// Fully expanded defining polynomial.
    pub fn expand_defining(&self) -> QPoly {
        let mut acc = QPoly::constant(Rationals, self.vars.clone(), Rationals.one());
        for f in &self.factors {
            acc = &acc * f;
        }
        acc
    }

    /// Evaluates `F` in factored form modulo `p`.
    pub fn evaluate_mod(&self, p: &PrimeField, point: &[u64]) -> u64 {
        self.factors.iter().fold(1, |acc, f| {
            let v = f
                .reduce_mod(p)
                .expect("integral minors")
                .evaluate(point)
                .expect("point length");
            p.mul(&acc, &v)
        })
    }

    /// Integer coefficients of each factor (minors have coefficients +-1).
    pub fn integer_factors(&self) -> Vec<Vec<(Monomial, i64)>> {
        self.factors
            .iter()
            .map(|f| {
                f.terms()
                    .iter()
                    .map(|(m, c)| {
                        let v = c.to_integer();
                        (*m, i64::try_from(v).expect("small integer coefficient"))
                    })
                    .collect()
            })
            .collect()
    }

    /// `{1,2,3}`-style label set.
    pub fn label_string(&self) -> String {
        let ids: Vec<String> = self.ids().iter().map(|i| i.to_string()).collect();
        format!("{{{}}}", ids.join(","))
    }
}

impl PartialEq for Arrangement {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.labels == other.labels
    }
}

impl Eq for Arrangement {}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.shape, self.label_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_polynomial;

    #[test]
    fn printed_minors() {
        let arr = Arrangement::full(MatrixShape::DEFAULT);
        let vars = arr.vars().clone();
        let f1 = parse_polynomial(
            "-x3*y2*z1 + x2*y3*z1 + x3*y1*z2 - x1*y3*z2 - x2*y1*z3 + x1*y2*z3",
            &vars,
        )
        .unwrap();
        let f10 = parse_polynomial(
            "-x5*y4*z3 + x4*y5*z3 + x5*y3*z4 - x3*y5*z4 - x4*y3*z5 + x3*y4*z5",
            &vars,
        )
        .unwrap();
        assert_eq!(arr.factors()[0], f1);
        assert_eq!(arr.factors()[9], f10);
        // term order and rendering also match the printed list
        assert_eq!(
            arr.factors()[0].to_string(),
            "-x3*y2*z1 + x2*y3*z1 + x3*y1*z2 - x1*y3*z2 - x2*y1*z3 + x1*y2*z3"
        );
    }

    #[test]
    fn degrees_and_support() {
        let a = Arrangement::from_ids(&[4, 2, 3, 1]).unwrap();
        assert_eq!(a.ids(), vec![1, 2, 3, 4]);
        assert_eq!(a.degree(), 12);
        assert_eq!(a.column_support(), (1..=4).collect());
        assert_eq!(a.active_variables().len(), 12);
        let full = Arrangement::full(MatrixShape::DEFAULT);
        assert_eq!(full.degree(), 30);
        assert_eq!(full.column_support(), (1..=5).collect());
    }

    #[test]
    fn duplicates_and_empty_rejected() {
        assert_eq!(Arrangement::from_ids(&[1, 1, 2]), Err(ModelError::NotReduced(1)));
        assert_eq!(Arrangement::from_ids(&[]), Err(ModelError::EmptyArrangement));
        assert!(matches!(
            Arrangement::from_ids(&[11]),
            Err(ModelError::InvalidLabel(11))
        ));
    }

    #[test]
    fn every_minor_has_one_variable_per_row() {
        for (m, n) in [(2, 4), (3, 5)] {
            let shape = MatrixShape::new(m, n).unwrap();
            for f in Arrangement::full(shape).factors() {
                assert_eq!(f.len(), if m == 2 { 2 } else { 6 });
                for (mono, _) in f.terms() {
                    let rows: Vec<usize> = mono.support().map(|v| v / n).collect();
                    assert_eq!(rows, (0..m).collect::<Vec<_>>());
                }
            }
        }
    }
}
