use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::algebra::{binomial, Monomial, QPoly, VariableOrder};
use crate::error::ModelError;

/// Size of the generic matrix of indeterminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatrixShape {
    m: usize,
    n: usize,
}

impl MatrixShape {
    pub const DEFAULT: MatrixShape = MatrixShape { m: 3, n: 5 };

    /// Supported shapes are `2 x n` for `n <= 6` and `3 x n` for `n <= 5`.
    pub fn new(m: usize, n: usize) -> Result<Self, ModelError> {
        let reject = |reason| Err(ModelError::InvalidShape { m, n, reason });
        if m >= n {
            return reject("need m < n");
        }
        match m {
            2 if n <= 6 => Ok(MatrixShape { m, n }),
            3 if n <= 5 => Ok(MatrixShape { m, n }),
            2 | 3 => reject("too many columns"),
            _ => reject("only 2 or 3 rows are supported"),
        }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.m * self.n
    }

    pub fn minor_count(&self) -> usize {
        binomial(self.n, self.m)
    }

    /// Index of the entry in row `r`, column `c` (both 0-based).
    pub fn var_index(&self, r: usize, c: usize) -> usize {
        r * self.n + c
    }

    pub fn variables(&self) -> Arc<VariableOrder> {
        Arc::new(VariableOrder::generic_matrix(self.m, self.n).expect("supported shape"))
    }

    pub fn labels(&self) -> Vec<MinorLabel> {
        (1..=self.minor_count())
            .map(|id| MinorLabel::from_id(*self, id).expect("id in range"))
            .collect()
    }
}

impl Default for MatrixShape {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for MatrixShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

impl FromStr for MatrixShape {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidShape {
            m: 0,
            n: 0,
            reason: "expected the form MxN",
        };
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let m = a.trim().parse().map_err(|_| bad())?;
        let n = b.trim().parse().map_err(|_| bad())?;
        MatrixShape::new(m, n)
    }
}

/// A maximal minor, identified by its colexicographic rank (1-based) and
/// its sorted 1-based column set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MinorLabel {
    id: usize,
    columns: Vec<usize>,
}

impl MinorLabel {
    /// Label of a column set. Ranks follow colex order (largest column
    /// compared first), which for `3x5` gives f1 = {1,2,3}, f5 = {1,2,5},
    /// f10 = {3,4,5}.
    pub fn from_columns(shape: MatrixShape, columns: &[usize]) -> Result<Self, ModelError> {
        let mut cols = columns.to_vec();
        cols.sort_unstable();
        let valid = cols.len() == shape.rows()
            && cols.windows(2).all(|w| w[0] < w[1])
            && cols.first().is_some_and(|&c| c >= 1)
            && cols.last().is_some_and(|&c| c <= shape.cols());
        if !valid {
            return Err(ModelError::InvalidColumns(columns.to_vec()));
        }
        let rank: usize = cols.iter().enumerate().map(|(i, &c)| binomial(c - 1, i + 1)).sum();
        Ok(MinorLabel {
            id: rank + 1,
            columns: cols,
        })
    }

    pub fn from_id(shape: MatrixShape, id: usize) -> Result<Self, ModelError> {
        if id == 0 || id > shape.minor_count() {
            return Err(ModelError::InvalidLabel(id));
        }
        // unrank: greedily choose the largest column first
        let mut rest = id - 1;
        let mut cols = vec![0; shape.rows()];
        for i in (1..=shape.rows()).rev() {
            let mut c = i;
            while binomial(c, i) <= rest {
                c += 1;
            }
            rest -= binomial(c - 1, i);
            cols[i - 1] = c;
        }
        Ok(MinorLabel { id, columns: cols })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }
}

impl fmt::Display for MinorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.id)
    }
}

/// Determinant of the selected columns, rows in order `x, y, z` and columns
/// increasing, expanded over permutations.
pub fn minor(shape: MatrixShape, label: &MinorLabel, vars: &Arc<VariableOrder>) -> QPoly {
    let m = shape.rows();
    let mut terms = Vec::new();
    for (perm, sign) in column_permutations(m) {
        let mut mono = Monomial::ONE;
        for (row, &p) in perm.iter().enumerate() {
            mono = mono.mul(&Monomial::variable(shape.var_index(row, label.columns[p] - 1)));
        }
        terms.push((mono, sign));
    }
    QPoly::from_integer_terms(vars.clone(), terms)
}

/// All permutations of `0..k` with their signs.
pub fn column_permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let inversions = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            (p, if inversions % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_polynomial;

    #[test]
    fn shape_validation() {
        assert!(MatrixShape::new(3, 5).is_ok());
        assert!(MatrixShape::new(2, 6).is_ok());
        assert!(MatrixShape::new(4, 3).is_err());
        assert!(MatrixShape::new(3, 3).is_err());
        assert!(MatrixShape::new(3, 6).is_err());
        assert_eq!("2x4".parse::<MatrixShape>().unwrap(), MatrixShape::new(2, 4).unwrap());
        assert!("4x3".parse::<MatrixShape>().is_err());
    }

    #[test]
    fn printed_label_order() {
        let shape = MatrixShape::DEFAULT;
        let expected = [
            [1, 2, 3],
            [1, 2, 4],
            [1, 3, 4],
            [2, 3, 4],
            [1, 2, 5],
            [1, 3, 5],
            [2, 3, 5],
            [1, 4, 5],
            [2, 4, 5],
            [3, 4, 5],
        ];
        for (i, cols) in expected.iter().enumerate() {
            let label = MinorLabel::from_columns(shape, cols).unwrap();
            assert_eq!(label.id(), i + 1);
            assert_eq!(MinorLabel::from_id(shape, i + 1).unwrap().columns(), cols);
        }
    }

    #[test]
    fn wrong_subset_size() {
        let shape = MatrixShape::DEFAULT;
        assert!(MinorLabel::from_columns(shape, &[1, 2]).is_err());
        assert!(MinorLabel::from_columns(shape, &[1, 2, 6]).is_err());
        assert!(MinorLabel::from_columns(shape, &[2, 2, 3]).is_err());
        assert!(MinorLabel::from_id(shape, 11).is_err());
    }

    #[test]
    fn label_roundtrip_all_shapes() {
        for (m, n) in [(2, 3), (2, 4), (2, 5), (2, 6), (3, 4), (3, 5)] {
            let shape = MatrixShape::new(m, n).unwrap();
            for label in shape.labels() {
                assert_eq!(MinorLabel::from_columns(shape, label.columns()).unwrap(), label);
            }
        }
    }

    #[test]
    fn two_row_minor() {
        let shape = MatrixShape::new(2, 3).unwrap();
        let vars = shape.variables();
        let label = MinorLabel::from_columns(shape, &[1, 2]).unwrap();
        assert_eq!(label.id(), 1);
        assert_eq!(
            minor(shape, &label, &vars),
            parse_polynomial("x1*y2 - x2*y1", &vars).unwrap()
        );
    }

    #[test]
    fn permutation_signs() {
        let perms = column_permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms.iter().map(|p| p.1).sum::<i64>(), 0);
    }
}
