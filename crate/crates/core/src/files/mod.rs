//! Persisted formats: certificates, reports and cross-check scripts.
//!
//! All JSON is written in one canonical form: UTF-8, object keys sorted,
//! two-space indentation and a trailing newline. Numbers are integers;
//! rationals are strings such as `"-3/2"`.

pub mod certificate;
pub mod crosscheck;
pub mod report;

use serde::Serialize;

use crate::error::FileError;

pub use certificate::{
    read_certificate, verify_certificate_file, write_certificate, CertificateFile, EvidenceFile, VerifyOutcome,
    VerifyStage,
};
pub use crosscheck::singular_script;
pub use report::{AnalysisRecord, AnalyzeReport, ConfigEcho, Provenance, VerdictRecord, REPORT_VERSION};

/// Serializes through `serde_json::Value`, whose maps are ordered by key.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, FileError> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted() {
        #[derive(Serialize)]
        struct T {
            zeta: u8,
            alpha: u8,
        }
        let s = canonical_json(&T { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert!(s.ends_with("}\n"));
    }
}
