//! Analysis reports.

use serde::{Deserialize, Serialize};

use crate::analyzer::{
    paper_exponents, Analysis, AnalyzeConfig, BasisChoice, BasisSource, FreenessVerdict, VerdictKind,
};
use crate::graded::DimReport;
use crate::saito::{CertifyMode, SaitoMode};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// A published value.
    Paper,
    /// Computed here, not printed anywhere.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub d_max: u32,
    pub primes: usize,
    pub prime_bits: u32,
    pub seed: u64,
    pub mode: SaitoMode,
    pub basis: BasisChoice,
    pub extend: bool,
    pub full_depth: bool,
}

impl From<&AnalyzeConfig> for ConfigEcho {
    fn from(cfg: &AnalyzeConfig) -> Self {
        ConfigEcho {
            d_max: cfg.search.d_max,
            primes: cfg.search.primes,
            prime_bits: cfg.search.prime_bits,
            seed: cfg.search.seed,
            mode: match cfg.mode {
                CertifyMode::Pit(_) => SaitoMode::Pit,
                CertifyMode::Exact { .. } => SaitoMode::Exact,
            },
            basis: cfg.basis,
            extend: cfg.extend,
            full_depth: cfg.full_depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub kind: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents_provenance: Option<Provenance>,
    /// Saito constant as an exact rational string.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl VerdictRecord {
    pub fn from_analysis(a: &Analysis) -> Self {
        let mut rec = VerdictRecord {
            kind: a.verdict.kind(),
            exponents: None,
            exponents_provenance: None,
            constant: None,
            basis: None,
            regularity: None,
            z0: a.dims.z0(),
            witness_degree: None,
            reason: None,
        };
        match &a.verdict {
            FreenessVerdict::CertifiedFree {
                exponents,
                certificate,
                source,
            } => {
                let printed = paper_exponents(&a.arrangement);
                rec.exponents_provenance = Some(if printed.as_ref() == Some(exponents) {
                    Provenance::Paper
                } else {
                    Provenance::Derived
                });
                rec.exponents = Some(exponents.clone());
                rec.constant = Some(certificate.constant.to_string());
                rec.basis = Some(*source);
                rec.regularity = a.regularity().map(|r| r.regularity);
            }
            FreenessVerdict::NotFreeByDegreeCount { z0, deg_f } => {
                rec.reason = Some(format!(
                    "deg F - 1 = {} is less than the {} positive exponents required",
                    deg_f - 1,
                    a.arrangement.nvars() - 1 - z0
                ));
            }
            FreenessVerdict::NotFreeByGradedObstruction { degree, reason } => {
                rec.witness_degree = Some(*degree);
                rec.reason = Some(reason.clone());
            }
            FreenessVerdict::Undetermined { reason, .. } => rec.reason = Some(reason.clone()),
        }
        rec
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub shape: String,
    pub arrangement: Vec<usize>,
    pub labels: String,
    pub deg_f: usize,
    pub verdict: VerdictRecord,
    /// Certified `dim AR_d`, from degree zero up to the first uncertified degree.
    pub ar: Vec<usize>,
    pub generator_degrees: Vec<u32>,
    pub dims: DimReport,
    pub elapsed_ms: u64,
}

impl AnalysisRecord {
    pub fn from_analysis(a: &Analysis) -> Self {
        AnalysisRecord {
            shape: a.arrangement.shape().to_string(),
            arrangement: a.arrangement.ids(),
            labels: a.arrangement.label_string(),
            deg_f: a.arrangement.degree(),
            verdict: VerdictRecord::from_analysis(a),
            ar: a.dims.certified_ar(),
            generator_degrees: a.generators.ar_degrees(),
            dims: a.dims.clone(),
            elapsed_ms: a.elapsed.as_millis() as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub analyses: Vec<AnalysisRecord>,
}

impl AnalyzeReport {
    pub fn new(cfg: &AnalyzeConfig, analyses: &[Analysis]) -> Self {
        AnalyzeReport {
            schema_version: REPORT_VERSION,
            config: cfg.into(),
            analyses: analyses.iter().map(AnalysisRecord::from_analysis).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::analyze;
    use crate::model::Arrangement;

    #[test]
    fn provenance_labels() {
        let cfg = AnalyzeConfig::default();
        let f5 = analyze(&Arrangement::from_ids(&[1, 2, 3, 4, 5]).unwrap(), &cfg).unwrap();
        let cone = analyze(&Arrangement::from_ids(&[1, 2, 3, 4]).unwrap(), &cfg).unwrap();
        assert_eq!(
            VerdictRecord::from_analysis(&f5).exponents_provenance,
            Some(Provenance::Paper)
        );
        assert_eq!(
            VerdictRecord::from_analysis(&cone).exponents_provenance,
            Some(Provenance::Derived)
        );
        let report = AnalyzeReport::new(&cfg, &[f5, cone]);
        let text = super::super::canonical_json(&report).unwrap();
        let back: AnalyzeReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert!(text.contains("\"constant\": \"9375\"") || text.contains("\"constant\": \"-9375\""));
    }
}
