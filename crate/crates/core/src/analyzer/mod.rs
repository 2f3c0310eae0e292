//! Freeness verdicts: degree-count obstruction, graded obstruction from
//! certified dimensions, and certification through Saito's criterion.

pub mod hypothesis;

use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{CertifyError, GradedError, ModelError};
use crate::graded::{DimReport, GeneratorSet, GradedSearch, LiftReport, SearchConfig};
use crate::model::{paper_basis, verify_paper_basis, Arrangement, PaperBasisId, QDerivation};
use crate::saito::{certify_free, CertifyMode, SaitoCertificate};

pub use hypothesis::{
    enumerate_exponents, free_fit, nearly_free_fit, pinned_counts, shape_consistency, Consistency, FreeFit,
    ShapeHypothesis,
};

/// Which derivations to hand to Saito's criterion when both are available.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    /// The transcribed basis when one exists and passes exact tangency,
    /// otherwise the lifted generators.
    #[default]
    Auto,
    Paper,
    Lifted,
}

impl FromStr for BasisChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(BasisChoice::Auto),
            "paper" => Ok(BasisChoice::Paper),
            "lifted" => Ok(BasisChoice::Lifted),
            other => Err(format!("unknown basis choice {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyzeConfig {
    pub search: SearchConfig,
    pub mode: CertifyMode,
    pub basis: BasisChoice,
    /// Keep computing dimensions through `d_max` after the verdict is known.
    pub full_depth: bool,
    /// Step past `d_max` (up to the search's degree budget) while the
    /// certified data still leaves room for an exponent above `d_max`.
    pub extend: bool,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            search: SearchConfig::default(),
            mode: CertifyMode::default(),
            basis: BasisChoice::Auto,
            full_depth: false,
            extend: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    CertifiedFree,
    NotFreeByDegreeCount,
    NotFreeByGradedObstruction,
    Undetermined,
}

impl VerdictKind {
    pub fn is_not_free(self) -> bool {
        matches!(
            self,
            VerdictKind::NotFreeByDegreeCount | VerdictKind::NotFreeByGradedObstruction
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::CertifiedFree => "certified_free",
            VerdictKind::NotFreeByDegreeCount => "not_free_by_degree_count",
            VerdictKind::NotFreeByGradedObstruction => "not_free_by_graded_obstruction",
            VerdictKind::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisSource {
    Paper,
    Lifted,
}

#[derive(Clone, Debug)]
pub enum FreenessVerdict {
    CertifiedFree {
        exponents: Vec<u32>,
        certificate: Box<SaitoCertificate>,
        source: BasisSource,
    },
    NotFreeByDegreeCount {
        z0: usize,
        deg_f: usize,
    },
    /// Certified dimensions through `degree` admit no exponent multiset.
    NotFreeByGradedObstruction {
        degree: u32,
        reason: String,
    },
    Undetermined {
        explored: Option<u32>,
        reason: String,
    },
}

impl FreenessVerdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            FreenessVerdict::CertifiedFree { .. } => VerdictKind::CertifiedFree,
            FreenessVerdict::NotFreeByDegreeCount { .. } => VerdictKind::NotFreeByDegreeCount,
            FreenessVerdict::NotFreeByGradedObstruction { .. } => VerdictKind::NotFreeByGradedObstruction,
            FreenessVerdict::Undetermined { .. } => VerdictKind::Undetermined,
        }
    }

    pub fn exponents(&self) -> Option<&[u32]> {
        match self {
            FreenessVerdict::CertifiedFree { exponents, .. } => Some(exponents),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&SaitoCertificate> {
        match self {
            FreenessVerdict::CertifiedFree { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

/// Everything `analyze` learned about one arrangement.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub arrangement: Arrangement,
    pub verdict: FreenessVerdict,
    pub dims: DimReport,
    pub generators: GeneratorSet,
    pub lifts: Vec<LiftReport>,
    pub elapsed: Duration,
}

impl Analysis {
    /// Castelnuovo-Mumford regularity of `S/J_F`, for certified-free verdicts.
    pub fn regularity(&self) -> Option<RegularityReport> {
        let exps = self.verdict.exponents()?;
        regularity_from_exponents(exps, self.arrangement.degree()).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regularity: usize,
    pub max_exponent: u32,
    pub deg_f: usize,
}

/// `reg(S/J_F) = max d_i + deg F - 3` for a free arrangement.
pub fn regularity_from_exponents(exps: &[u32], deg_f: usize) -> Result<RegularityReport, ModelError> {
    let max = *exps
        .iter()
        .max()
        .ok_or_else(|| ModelError::BasisData("regularity needs certified exponents".into()))?;
    if deg_f < 3 {
        return Err(ModelError::BasisData("defining polynomial of degree below 3".into()));
    }
    Ok(RegularityReport {
        regularity: max as usize + deg_f - 3,
        max_exponent: max,
        deg_f,
    })
}

/// Exponents printed for this arrangement, if the arrangement is one of the
/// published free cases. Anything else the artifact reports is derived.
pub fn paper_exponents(arr: &Arrangement) -> Option<Vec<u32>> {
    if arr.shape() != crate::model::MatrixShape::DEFAULT {
        return None;
    }
    let ones = |n: usize, tail: &[u32]| [vec![1; n], tail.to_vec()].concat();
    match arr.ids().as_slice() {
        [1, 2, 3, 4, j] if (5..=10).contains(j) => Some(ones(14, &[])),
        [1, 2, 3, 4, 5, k] if (6..=9).contains(k) => Some(ones(13, &[4])),
        [1, 2, 3, 4, 7, 8, 9] => Some(ones(12, &[4, 4])),
        _ => None,
    }
}

/// Dimension of the constant tangent derivations, certified.
pub fn essential_defect(arr: &Arrangement, cfg: &SearchConfig) -> Result<usize, GradedError> {
    let mut search = GradedSearch::new(
        arr,
        &SearchConfig {
            d_max: 0,
            ..cfg.clone()
        },
    )?;
    let dims = search.step().clone();
    dims.dim_ar(arr.nvars()).ok_or(GradedError::Uncertified(0))
}

/// Obstruction when fewer than `N - 1 - z0` positive exponents would have to
/// share a total of `deg F - 1`.
pub fn degree_count_test(arr: &Arrangement, z0: usize) -> Option<FreenessVerdict> {
    let rank = arr.nvars() - 1;
    let deg_f = arr.degree();
    (z0 > rank || deg_f - 1 < rank - z0).then_some(FreenessVerdict::NotFreeByDegreeCount { z0, deg_f })
}

fn choose_basis(
    arr: &Arrangement,
    lifted: Vec<QDerivation>,
    choice: BasisChoice,
) -> Result<(Vec<QDerivation>, BasisSource), String> {
    let paper = PaperBasisId::for_arrangement(arr);
    let usable = |id: PaperBasisId| matches!(verify_paper_basis(id), Ok(f) if f.is_empty());
    match (choice, paper) {
        (BasisChoice::Lifted, _) | (BasisChoice::Auto, None) => Ok((lifted, BasisSource::Lifted)),
        (BasisChoice::Auto, Some(id)) if !usable(id) => Ok((lifted, BasisSource::Lifted)),
        (BasisChoice::Auto | BasisChoice::Paper, Some(id)) => {
            if let Ok(failures) = verify_paper_basis(id) {
                if let Some(f) = failures.first() {
                    return Err(format!(
                        "transcribed basis {id}: {} ({}) fails: {}",
                        f.name,
                        f.index + 1,
                        f.detail
                    ));
                }
            }
            paper_basis(id)
                .map(|b| (b, BasisSource::Paper))
                .map_err(|e| e.to_string())
        }
        (BasisChoice::Paper, None) => Err("no transcribed basis for this arrangement".into()),
    }
}

fn certify(arr: &Arrangement, gens: &GeneratorSet, cfg: &AnalyzeConfig) -> Result<FreenessVerdict, String> {
    let lifted: Vec<QDerivation> = gens.ar_generators().map(|g| g.derivation.clone()).collect();
    let (basis, source) = choose_basis(arr, lifted.clone(), cfg.basis)?;
    let attempt = certify_free(arr, &basis, &cfg.mode);
    let (cert, source) = match (attempt, source) {
        (Ok(c), s) => (c, s),
        (Err(_), BasisSource::Paper) if cfg.basis == BasisChoice::Auto => (
            certify_free(arr, &lifted, &cfg.mode).map_err(|e: CertifyError| e.to_string())?,
            BasisSource::Lifted,
        ),
        (Err(e), _) => return Err(e.to_string()),
    };
    Ok(FreenessVerdict::CertifiedFree {
        exponents: cert.exponents(),
        certificate: Box::new(cert),
        source,
    })
}

/// Runs the full pipeline on one arrangement.
pub fn analyze(arr: &Arrangement, cfg: &AnalyzeConfig) -> Result<Analysis, GradedError> {
    let start = Instant::now();
    let mut search = GradedSearch::new(arr, &cfg.search)?;
    let rank = arr.nvars() - 1;
    let deg_f = arr.degree();
    let d_max = cfg.search.d_max;
    let mut verdict: Option<FreenessVerdict> = None;
    let mut limit = d_max;

    while search.next_degree() <= limit {
        if verdict.is_some() && !cfg.full_depth {
            break;
        }
        let dims = search.step().clone();
        let d = dims.degree;
        if !dims.certified() {
            if verdict.is_none() {
                verdict = Some(FreenessVerdict::Undetermined {
                    explored: d.checked_sub(1),
                    reason: format!(
                        "degree {d} not certified (bounds {}..{})",
                        dims.dim_d_lower, dims.dim_d_upper
                    ),
                });
            }
            break;
        }
        if verdict.is_some() {
            continue;
        }
        if d == 0 {
            let z0 = dims.dim_ar(arr.nvars()).expect("certified");
            verdict = degree_count_test(arr, z0);
            continue;
        }
        let gens = search.generator_set();
        let degrees = gens.ar_degrees();
        if degrees.len() == rank && degrees.iter().map(|&e| e as usize).sum::<usize>() == deg_f - 1 {
            verdict = Some(
                certify(arr, &gens, cfg).unwrap_or_else(|reason| FreenessVerdict::Undetermined {
                    explored: Some(d),
                    reason: format!("Saito check failed: {reason}"),
                }),
            );
            continue;
        }
        let ar = search.report().certified_ar();
        match free_fit(&ar, arr.nvars(), rank, deg_f - 1) {
            FreeFit::Impossible { degree, reason } => {
                verdict = Some(FreenessVerdict::NotFreeByGradedObstruction { degree, reason });
            }
            FreeFit::Possible {
                remaining,
                remaining_sum,
                ..
            } if cfg.extend && remaining > 0 && d >= d_max => {
                // largest exponent left open once the others take the minimum
                let top = remaining_sum - (remaining - 1) * (d as usize + 1);
                limit = (top.min(cfg.search.degree_budget as usize) as u32).max(d_max);
            }
            FreeFit::Possible { .. } => {}
        }
    }
    let explored = search.report().certified_through();
    let verdict = verdict.unwrap_or_else(|| FreenessVerdict::Undetermined {
        explored,
        reason: format!("no obstruction and no basis through degree {}", explored.unwrap_or(0)),
    });
    Ok(Analysis {
        arrangement: arr.clone(),
        verdict,
        dims: search.report().clone(),
        generators: search.generator_set(),
        lifts: search.lifts().to_vec(),
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn run(ids: &[usize]) -> Analysis {
        analyze(&Arrangement::from_ids(ids).unwrap(), &AnalyzeConfig::default()).unwrap()
    }

    #[test]
    fn five_minor_certified_with_transcribed_basis() {
        let a = run(&[1, 2, 3, 4, 5]);
        assert_eq!(a.verdict.kind(), VerdictKind::CertifiedFree);
        assert_eq!(a.verdict.exponents().unwrap(), &[1; 14]);
        let cert = a.verdict.certificate().unwrap();
        assert_eq!(cert.abs_constant(), BigRational::from_integer(9375.into()));
        assert_eq!(a.regularity().unwrap().regularity, 13);
    }

    #[test]
    fn columns_six_to_ten_not_free() {
        let a = run(&[6, 7, 8, 9, 10]);
        assert_eq!(a.dims.ar(1), Some(16));
        assert!(a.verdict.kind().is_not_free());
    }

    #[test]
    fn h10_graded_obstruction() {
        let a = run(&[1, 2, 3, 4, 5, 10]);
        assert_eq!(a.verdict.kind(), VerdictKind::NotFreeByGradedObstruction);
        assert!(matches!(
            a.verdict,
            FreenessVerdict::NotFreeByGradedObstruction { degree: 2, .. }
        ));
        assert_eq!(a.dims.certified_ar(), vec![0, 12, 180]);
    }

    #[test]
    fn three_subsets_fail_degree_count() {
        let a = run(&[1, 2, 3]);
        assert!(matches!(
            a.verdict,
            FreenessVerdict::NotFreeByDegreeCount { z0: 3, deg_f: 9 }
        ));
        let b = run(&[1, 2, 3, 5]);
        assert!(matches!(
            b.verdict,
            FreenessVerdict::NotFreeByDegreeCount { z0: 0, deg_f: 12 }
        ));
    }

    #[test]
    fn cone_over_three_by_four_is_free() {
        let a = run(&[1, 2, 3, 4]);
        assert_eq!(a.verdict.kind(), VerdictKind::CertifiedFree);
        let mut expected = vec![0; 3];
        expected.extend([1; 11]);
        assert_eq!(a.verdict.exponents().unwrap(), expected.as_slice());
        assert_eq!(a.regularity().unwrap().regularity, 10);
    }

    #[test]
    fn regularity_formula() {
        assert_eq!(regularity_from_exponents(&[1; 14], 15).unwrap().regularity, 13);
        let mut mid = vec![1; 13];
        mid.push(4);
        assert_eq!(regularity_from_exponents(&mid, 18).unwrap().regularity, 19);
        assert!(regularity_from_exponents(&[], 15).is_err());
    }

    #[test]
    fn essential_defect_values() {
        let cfg = SearchConfig::default();
        let z = |ids: &[usize]| essential_defect(&Arrangement::from_ids(ids).unwrap(), &cfg).unwrap();
        assert_eq!(z(&[1, 2, 3]), 3);
        assert_eq!(z(&(1..=10).collect::<Vec<_>>()), 0);
        assert_eq!(z(&[1, 2, 3, 4]), 3);
    }
}
