use std::collections::HashMap;
use std::fmt;

use super::monomial::MAX_VARS;
use crate::error::AlgebraError;

/// Immutable, ordered list of variable names.
#[derive(Clone, PartialEq, Eq)]
pub struct VariableOrder {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VariableOrder {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, AlgebraError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_VARS {
            return Err(AlgebraError::TooManyVariables(names.len()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(AlgebraError::Parse(format!("duplicate variable `{n}`")));
            }
        }
        Ok(VariableOrder { names, index })
    }

    /// Variables of a generic `rows x cols` matrix: row letters `x, y, z`,
    /// columns numbered from 1, entry `(r, c)` at index `r * cols + c`.
    pub fn generic_matrix(rows: usize, cols: usize) -> Result<Self, AlgebraError> {
        const ROW_NAMES: [char; 3] = ['x', 'y', 'z'];
        if rows == 0 || rows > ROW_NAMES.len() {
            return Err(AlgebraError::Parse(format!("unsupported row count {rows}")));
        }
        let names = (0..rows).flat_map(|r| (1..=cols).map(move |c| format!("{}{}", ROW_NAMES[r], c)));
        Self::new(names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

impl fmt::Debug for VariableOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VariableOrder({})", self.names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_three_by_five_layout() {
        let v = VariableOrder::generic_matrix(3, 5).unwrap();
        assert_eq!(v.len(), 15);
        assert_eq!(v.name(0), "x1");
        assert_eq!(v.name(5), "y1");
        assert_eq!(v.name(14), "z5");
        for i in 0..15 {
            assert_eq!(v.index_of(v.name(i)), Some(i));
        }
    }

    #[test]
    fn rejects_duplicates() {
        assert!(VariableOrder::new(["a", "a"]).is_err());
    }
}
