//! Self-contained freeness certificates.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::canonical_json;
use crate::algebra::Monomial;
use crate::analyzer::BasisSource;
use crate::error::FileError;
use crate::model::{Arrangement, MatrixShape, QDerivation};
use crate::saito::{Evidence, PitEvidence, SaitoCertificate, SaitoMode};

pub const CERTIFICATE_FORMAT: &str = "detfree-certificate";
pub const CERTIFICATE_VERSION: u32 = 1;

/// One coefficient term: variable index, exponent vector, numerator, denominator.
pub type TermEntry = (usize, Vec<u8>, String, String);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum EvidenceFile {
    Pit(PitEvidence),
    Exact { identity_hash: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreationInfo {
    pub tool: String,
    /// Where the derivations came from: the transcribed basis or lifted generators.
    pub basis: Option<BasisSource>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format: String,
    pub version: u32,
    pub shape: [usize; 2],
    pub variables: Vec<String>,
    pub arrangement: Vec<usize>,
    pub derivations: Vec<Vec<TermEntry>>,
    pub exponents: Vec<u32>,
    /// The Saito constant as an exact rational string.
    pub constant: String,
    pub evidence: EvidenceFile,
    pub created: CreationInfo,
}

fn rational_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse_rational(s: &str) -> Result<BigRational, FileError> {
    let bad = || FileError::Malformed(format!("not an exact rational: {s:?}"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl CertificateFile {
    pub fn from_certificate(cert: &SaitoCertificate, basis: Option<BasisSource>) -> Self {
        let arr = &cert.arrangement;
        let nvars = arr.nvars();
        let derivations = cert
            .derivations
            .iter()
            .map(|d| {
                d.triples()
                    .into_iter()
                    .map(|(u, m, c)| {
                        (
                            u,
                            m.exponents(nvars).to_vec(),
                            c.numer().to_string(),
                            c.denom().to_string(),
                        )
                    })
                    .collect()
            })
            .collect();
        let evidence = match &cert.evidence {
            Evidence::Probabilistic(ev) => EvidenceFile::Pit(ev.clone()),
            Evidence::Exact { identity_hash } => EvidenceFile::Exact {
                identity_hash: identity_hash.clone(),
            },
        };
        CertificateFile {
            format: CERTIFICATE_FORMAT.into(),
            version: CERTIFICATE_VERSION,
            shape: [arr.shape().rows(), arr.shape().cols()],
            variables: arr.vars().names().to_vec(),
            arrangement: arr.ids(),
            derivations,
            exponents: cert.exponents(),
            constant: rational_string(&cert.constant),
            evidence,
            created: CreationInfo {
                tool: concat!("detfree ", env!("CARGO_PKG_VERSION")).into(),
                basis,
            },
        }
    }

    /// Rebuilds the certificate. Checks the header and the consistency of
    /// the stored variable names, but not the mathematics.
    pub fn to_certificate(&self) -> Result<SaitoCertificate, FileError> {
        if self.format != CERTIFICATE_FORMAT {
            return Err(FileError::Malformed(format!("unexpected format {:?}", self.format)));
        }
        if self.version != CERTIFICATE_VERSION {
            return Err(FileError::Version(self.version));
        }
        let shape = MatrixShape::new(self.shape[0], self.shape[1])?;
        let arr = Arrangement::new(shape, &self.arrangement)?;
        if arr.vars().names() != self.variables.as_slice() {
            return Err(FileError::Malformed("variable order does not match the shape".into()));
        }
        let nvars = arr.nvars();
        let mut derivations = Vec::with_capacity(self.derivations.len());
        for entries in &self.derivations {
            let mut triples = Vec::with_capacity(entries.len());
            for (u, exps, num, den) in entries {
                if exps.len() != nvars {
                    return Err(FileError::Malformed(format!(
                        "exponent vector of length {}",
                        exps.len()
                    )));
                }
                let c = parse_rational(&format!("{num}/{den}"))?;
                triples.push((*u, Monomial::from_exponents(exps), c));
            }
            derivations.push(QDerivation::from_triples(arr.vars(), triples)?);
        }
        let evidence = match &self.evidence {
            EvidenceFile::Pit(ev) => Evidence::Probabilistic(ev.clone()),
            EvidenceFile::Exact { identity_hash } => Evidence::Exact {
                identity_hash: identity_hash.clone(),
            },
        };
        Ok(SaitoCertificate {
            arrangement: arr,
            derivations,
            constant: parse_rational(&self.constant)?,
            evidence,
        })
    }

    pub fn mode(&self) -> SaitoMode {
        match self.evidence {
            EvidenceFile::Pit(_) => SaitoMode::Pit,
            EvidenceFile::Exact { .. } => SaitoMode::Exact,
        }
    }

    pub fn to_json(&self) -> Result<String, FileError> {
        canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn write_certificate(path: &Path, cert: &SaitoCertificate, basis: Option<BasisSource>) -> Result<(), FileError> {
    std::fs::write(path, CertificateFile::from_certificate(cert, basis).to_json()?)?;
    Ok(())
}

pub fn read_certificate(path: &Path) -> Result<CertificateFile, FileError> {
    CertificateFile::from_json(&std::fs::read_to_string(path)?)
}

/// Stage at which an independent re-verification stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyStage {
    Parse,
    Count,
    Tangency,
    DegreeSum,
    Exponents,
    Determinant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOutcome {
    pub passed: bool,
    pub failed_stage: Option<VerifyStage>,
    pub detail: String,
}

/// Re-runs Saito's criterion on a certificate file with randomness from `seed`.
pub fn verify_certificate_file(file: &CertificateFile, seed: u64) -> VerifyOutcome {
    use crate::error::CertifyError as E;
    let fail = |stage, detail: String| VerifyOutcome {
        passed: false,
        failed_stage: Some(stage),
        detail,
    };
    let cert = match file.to_certificate() {
        Ok(c) => c,
        Err(e) => return fail(VerifyStage::Parse, e.to_string()),
    };
    if let Err(e) = cert.verify(seed) {
        let stage = match e {
            E::Count { .. } => VerifyStage::Count,
            E::Tangency(_) => VerifyStage::Tangency,
            E::DegreeSum { .. } => VerifyStage::DegreeSum,
            _ => VerifyStage::Determinant,
        };
        return fail(stage, e.to_string());
    }
    if cert.exponents() != file.exponents {
        return fail(
            VerifyStage::Exponents,
            format!(
                "claimed exponents {:?}, derivations have {:?}",
                file.exponents,
                cert.exponents()
            ),
        );
    }
    VerifyOutcome {
        passed: true,
        failed_stage: None,
        detail: format!("|c| = {}", rational_string(&cert.abs_constant())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{paper_basis, PaperBasisId};
    use crate::saito::{certify_free, CertifyMode};

    fn thm_a_file() -> CertificateFile {
        let arr = Arrangement::from_ids(&[1, 2, 3, 4, 5]).unwrap();
        let basis = paper_basis(PaperBasisId::ThmA(5)).unwrap();
        let cert = certify_free(&arr, &basis, &CertifyMode::default()).unwrap();
        CertificateFile::from_certificate(&cert, Some(BasisSource::Paper))
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let file = thm_a_file();
        let text = file.to_json().unwrap();
        let back = CertificateFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json().unwrap(), text);
        let rebuilt = CertificateFile::from_certificate(&back.to_certificate().unwrap(), Some(BasisSource::Paper));
        assert_eq!(rebuilt.to_json().unwrap(), text);
        fn no_floats(v: &serde_json::Value) -> bool {
            match v {
                serde_json::Value::Number(n) => !n.is_f64(),
                serde_json::Value::Array(a) => a.iter().all(no_floats),
                serde_json::Value::Object(o) => o.values().all(no_floats),
                _ => true,
            }
        }
        assert!(no_floats(&serde_json::from_str(&text).unwrap()));
    }

    #[test]
    fn verification_stages() {
        let file = thm_a_file();
        assert!(verify_certificate_file(&file, 99).passed);
        assert!(file.constant.trim_start_matches('-') == "9375");

        let mut coef = file.clone();
        coef.derivations[3][0].2 = (coef.derivations[3][0].2.parse::<i64>().unwrap() + 1).to_string();
        assert_eq!(
            verify_certificate_file(&coef, 99).failed_stage,
            Some(VerifyStage::Tangency)
        );

        let mut c = file.clone();
        c.constant = "9376".into();
        assert_eq!(
            verify_certificate_file(&c, 99).failed_stage,
            Some(VerifyStage::Determinant)
        );

        let mut exps = file.clone();
        exps.exponents[0] = 0;
        assert_eq!(
            verify_certificate_file(&exps, 99).failed_stage,
            Some(VerifyStage::Exponents)
        );

        let mut version = file;
        version.version = 7;
        assert_eq!(
            verify_certificate_file(&version, 99).failed_stage,
            Some(VerifyStage::Parse)
        );
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(rational_string(&BigRational::new(4.into(), 2.into())), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }
}
