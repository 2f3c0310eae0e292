//! Transcribed derivation bases shipped as data files.
//!
//! File format (`data/*.json`): a JSON object with `format =
//! "detfree-derivations"`, `version = 1`, the matrix `shape`, the
//! `arrangement` labels, the `variables` in order, and `derivations`, each a
//! `name` plus a list of `[variable index, exponent vector, integer
//! coefficient]` terms meaning `coefficient * x^exponents * ∂_variable`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;

use super::arrangement::Arrangement;
use super::derivation::QDerivation;
use super::shape::{MatrixShape, MinorLabel};
use crate::algebra::{Monomial, VariableOrder};
use crate::error::ModelError;

const THM_A_5: &str = include_str!("../../data/thm_a_5.json");
const MID_7: &str = include_str!("../../data/mid_7.json");

/// Identifies a transcribed basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PaperBasisId {
    /// Degree-one basis for `f1 f2 f3 f4 fj`, `j in 5..=10`.
    ThmA(usize),
    /// Basis with one quartic derivation for `f1 ... f5 fk`; only `k = 7`.
    Mid(usize),
}

impl PaperBasisId {
    pub fn arrangement_ids(&self) -> Vec<usize> {
        match *self {
            PaperBasisId::ThmA(j) => vec![1, 2, 3, 4, j],
            PaperBasisId::Mid(k) => vec![1, 2, 3, 4, 5, k],
        }
    }

    pub fn arrangement(&self) -> Result<Arrangement, ModelError> {
        Arrangement::from_ids(&self.arrangement_ids())
    }

    /// Basis available for this arrangement, if any.
    pub fn for_arrangement(arr: &Arrangement) -> Option<PaperBasisId> {
        if arr.shape() != MatrixShape::DEFAULT {
            return None;
        }
        let ids = arr.ids();
        match ids.as_slice() {
            [1, 2, 3, 4, j] if (5..=10).contains(j) => Some(PaperBasisId::ThmA(*j)),
            [1, 2, 3, 4, 5, 7] => Some(PaperBasisId::Mid(7)),
            _ => None,
        }
    }
}

impl fmt::Display for PaperBasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaperBasisId::ThmA(j) => write!(f, "ThmA({j})"),
            PaperBasisId::Mid(k) => write!(f, "Mid({k})"),
        }
    }
}

impl FromStr for PaperBasisId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::UnknownBasis(s.to_string());
        let s = s.trim();
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let k: usize = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        match name.trim() {
            "ThmA" => Ok(PaperBasisId::ThmA(k)),
            "Mid" => Ok(PaperBasisId::Mid(k)),
            _ => Err(bad()),
        }
    }
}

#[derive(Deserialize)]
struct BasisFile {
    format: String,
    version: u32,
    shape: String,
    arrangement: Vec<usize>,
    variables: Vec<String>,
    derivations: Vec<DerivationEntry>,
}

#[derive(Deserialize)]
struct DerivationEntry {
    name: String,
    terms: Vec<(usize, Vec<u8>, i64)>,
}

/// A named derivation from a basis file.
#[derive(Clone, Debug)]
pub struct NamedDerivation {
    pub name: String,
    pub derivation: QDerivation,
}

/// Parses a basis file. Returns the arrangement it is stated for and the
/// derivations in file order.
pub fn parse_basis_file(text: &str) -> Result<(Arrangement, Vec<NamedDerivation>), ModelError> {
    let file: BasisFile = serde_json::from_str(text).map_err(|e| ModelError::BasisData(e.to_string()))?;
    if file.format != "detfree-derivations" || file.version != 1 {
        return Err(ModelError::BasisData(format!(
            "unsupported format {} v{}",
            file.format, file.version
        )));
    }
    let shape: MatrixShape = file.shape.parse()?;
    let arr = Arrangement::new(shape, &file.arrangement)?;
    let vars: Arc<VariableOrder> = arr.vars().clone();
    if file.variables != vars.names() {
        return Err(ModelError::BasisData(
            "variable order differs from the generic matrix".into(),
        ));
    }
    let mut out = Vec::with_capacity(file.derivations.len());
    for entry in file.derivations {
        let mut triples = Vec::with_capacity(entry.terms.len());
        for (u, exps, c) in entry.terms {
            if exps.len() != vars.len() {
                return Err(ModelError::BasisData(format!(
                    "{}: exponent vector of length {}",
                    entry.name,
                    exps.len()
                )));
            }
            triples.push((
                u,
                Monomial::from_exponents(&exps),
                BigRational::from_integer(BigInt::from(c)),
            ));
        }
        out.push(NamedDerivation {
            name: entry.name,
            derivation: QDerivation::from_triples(&vars, triples)?,
        });
    }
    Ok((arr, out))
}

/// Column permutation of `{1..5}` fixing 5 and sending `{1,2}` to the
/// two small columns of `f_j`; it carries `f1 f2 f3 f4 f5` to `± f1 f2 f3 f4 fj`.
fn thm_a_column_map(j: usize) -> [usize; 5] {
    let shape = MatrixShape::DEFAULT;
    let cols = MinorLabel::from_id(shape, j).expect("j in 5..=10").columns().to_vec();
    let (a, b) = (cols[0], cols[1]);
    let rest: Vec<usize> = (1..=4).filter(|c| *c != a && *c != b).collect();
    [a, b, rest[0], rest[1], 5]
}

/// The transcribed basis, as named derivations.
///
/// `ThmA(j)` for `j != 5` is the `j = 5` basis transported by the column
/// permutation from [`thm_a_column_map`].
pub fn paper_basis_named(id: PaperBasisId) -> Result<Vec<NamedDerivation>, ModelError> {
    match id {
        PaperBasisId::ThmA(5) => Ok(parse_basis_file(THM_A_5)?.1),
        PaperBasisId::ThmA(j) if (6..=10).contains(&j) => {
            let base = parse_basis_file(THM_A_5)?.1;
            let shape = MatrixShape::DEFAULT;
            let cols = thm_a_column_map(j);
            let perm: Vec<usize> = (0..shape.nvars())
                .map(|v| shape.var_index(v / shape.cols(), cols[v % shape.cols()] - 1))
                .collect();
            Ok(base
                .into_iter()
                .map(|nd| NamedDerivation {
                    name: nd.name,
                    derivation: nd.derivation.permute_variables(&perm),
                })
                .collect())
        }
        PaperBasisId::Mid(7) => Ok(parse_basis_file(MID_7)?.1),
        other => Err(ModelError::UnknownBasis(other.to_string())),
    }
}

pub fn paper_basis(id: PaperBasisId) -> Result<Vec<QDerivation>, ModelError> {
    Ok(paper_basis_named(id)?.into_iter().map(|n| n.derivation).collect())
}

/// One transcribed derivation that failed exact tangency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptionFailure {
    pub index: usize,
    pub name: String,
    pub label: usize,
    pub detail: String,
}

/// Exact tangency of every derivation of a transcribed basis.
pub fn verify_paper_basis(id: PaperBasisId) -> Result<Vec<TranscriptionFailure>, ModelError> {
    let arr = id.arrangement()?;
    let basis = paper_basis_named(id)?;
    Ok(basis
        .iter()
        .enumerate()
        .filter_map(|(index, nd)| {
            nd.derivation.tangent_to(&arr).err().map(|fail| TranscriptionFailure {
                index,
                name: nd.name.clone(),
                label: fail.label,
                detail: fail.to_string(),
            })
        })
        .collect())
}
