//! Exhaustive surveys over subsets of the maximal minors.

mod checklist;

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analyzer::{analyze, nearly_free_fit, AnalyzeConfig, Consistency, VerdictKind};
use crate::error::{FileError, SurveyError};
use crate::files::{canonical_json, CertificateFile, ConfigEcho, VerdictRecord, REPORT_VERSION};
use crate::model::{Arrangement, MatrixShape, MinorLabel};

pub use checklist::{paper_reproduction_suite, ChecklistEntry, SuiteOptions};

/// Certified `dim AR_1 .. dim AR_4` of the class with fifteen linear syzygies
/// and one relation in degree four.
pub const FINGERPRINT_AR: [usize; 4] = [15, 225, 1800, 10199];

/// All `k`-subsets of `1..=count` in lexicographic order.
pub fn enumerate_subsets(count: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, count: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=count {
            if count - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, count, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= count {
        rec(1, count, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// All `k`-subsets of the ten minors of the `3x5` model.
pub fn enumerate_arrangements(k: usize) -> Result<Vec<Vec<usize>>, SurveyError> {
    if !(1..=10).contains(&k) {
        return Err(SurveyError::SubsetSize(k));
    }
    Ok(enumerate_subsets(10, k))
}

/// Image of a label set under every permutation of the matrix columns.
/// Column permutations are linear changes of coordinates, so every graded
/// invariant is constant on these orbits.
pub fn column_orbit(shape: MatrixShape, ids: &[usize]) -> Result<Vec<Vec<usize>>, crate::error::ModelError> {
    let labels: Vec<MinorLabel> = ids
        .iter()
        .map(|&i| MinorLabel::from_id(shape, i))
        .collect::<Result<_, _>>()?;
    let mut images = std::collections::BTreeSet::new();
    for (perm, _) in crate::model::column_permutations(shape.cols()) {
        let mut image: Vec<usize> = labels
            .iter()
            .map(|l| {
                let cols: Vec<usize> = l.columns().iter().map(|&c| perm[c - 1] + 1).collect();
                MinorLabel::from_columns(shape, &cols).map(|m| m.id())
            })
            .collect::<Result<_, _>>()?;
        image.sort_unstable();
        images.insert(image);
    }
    Ok(images.into_iter().collect())
}

/// Splits a family into column orbits, each given by its smallest member and size.
pub fn orbit_decomposition(
    shape: MatrixShape,
    sets: &[Vec<usize>],
) -> Result<Vec<(Vec<usize>, usize)>, crate::error::ModelError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for s in sets {
        if seen.contains(s) {
            continue;
        }
        let orbit = column_orbit(shape, s)?;
        out.push((orbit[0].clone(), orbit.len()));
        seen.extend(orbit);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Subsets(usize),
    Explicit(Vec<Vec<usize>>),
}

#[derive(Clone, Debug)]
pub struct SurveyConfig {
    pub shape: MatrixShape,
    pub family: Family,
    pub analyze: AnalyzeConfig,
    /// Stop at degree two and report the coarser signature.
    pub quick: bool,
    /// Worker threads; `None` uses the available parallelism.
    pub threads: Option<usize>,
    /// Allow subset sizes beyond four.
    pub experimental: bool,
    /// Compute certified dimensions through `d_max` even after a verdict,
    /// so that signatures are complete.
    pub full_depth: bool,
    /// JSON-lines file recording finished arrangements for resumption.
    pub checkpoint: Option<PathBuf>,
}

impl SurveyConfig {
    pub fn subsets(k: usize) -> Self {
        SurveyConfig {
            shape: MatrixShape::DEFAULT,
            family: Family::Subsets(k),
            analyze: AnalyzeConfig::default(),
            quick: false,
            threads: None,
            experimental: false,
            full_depth: k == 4,
            checkpoint: None,
        }
    }

    /// The analysis configuration actually used per arrangement.
    pub fn effective_analyze(&self) -> AnalyzeConfig {
        let mut cfg = self.analyze.clone();
        cfg.full_depth = self.full_depth;
        if self.quick {
            cfg.search.d_max = cfg.search.d_max.min(2);
            cfg.extend = false;
        }
        cfg
    }

    fn members(&self) -> Result<Vec<Vec<usize>>, SurveyError> {
        match &self.family {
            Family::Subsets(k) => {
                if *k > 4 && !self.experimental {
                    return Err(SurveyError::Experimental(*k));
                }
                let count = self.shape.minor_count();
                if *k == 0 || *k > count {
                    return Err(SurveyError::SubsetSize(*k));
                }
                Ok(enumerate_subsets(count, *k))
            }
            Family::Explicit(list) => Ok(list.clone()),
        }
    }

    /// Hash of everything that affects per-arrangement results.
    pub fn config_hash(&self) -> String {
        #[derive(Serialize)]
        struct Key<'a> {
            version: u32,
            shape: String,
            family: &'a Family,
            quick: bool,
            analyze: ConfigEcho,
            pit: String,
        }
        let cfg = self.effective_analyze();
        let key = Key {
            version: REPORT_VERSION,
            shape: self.shape.to_string(),
            family: &self.family,
            quick: self.quick,
            analyze: (&cfg).into(),
            pit: format!("{:?}", cfg.mode),
        };
        let text = canonical_json(&key).expect("serializable");
        Sha256::digest(text.as_bytes())
            .iter()
            .take(16)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Certified graded data plus the verdict kind. Degrees above the survey
/// depth, or not certified, are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignatureKey {
    pub z0: Option<usize>,
    pub ar: [Option<usize>; 4],
    pub verdict: VerdictKind,
}

impl SignatureKey {
    pub fn new(certified_ar: &[usize], verdict: VerdictKind) -> Self {
        let mut ar = [None; 4];
        for (slot, d) in ar.iter_mut().zip(1..) {
            *slot = certified_ar.get(d).copied();
        }
        SignatureKey {
            z0: certified_ar.first().copied(),
            ar,
            verdict,
        }
    }

    /// Matches the printed class: no constant derivations and the full
    /// degree 1..4 fingerprint, or in quick mode its degree 1..2 prefix.
    pub fn in_fingerprint_class(&self, quick: bool) -> bool {
        let depth = if quick { 2 } else { 4 };
        self.z0 == Some(0) && (0..depth).all(|i| self.ar[i] == Some(FINGERPRINT_AR[i]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyEntry {
    pub arrangement: Vec<usize>,
    pub labels: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictRecord>,
    pub ar: Vec<usize>,
    pub generator_degrees: Vec<u32>,
    pub signature: Option<SignatureKey>,
    pub fingerprint_class: bool,
    /// Result of the nearly-free necessary-condition check on the certified data.
    pub nearly_free_consistent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub elapsed_ms: u64,
}

impl SurveyEntry {
    /// The entry without its timing, for comparisons across runs.
    pub fn untimed(&self) -> SurveyEntry {
        SurveyEntry {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    pub fn kind(&self) -> Option<VerdictKind> {
        self.verdict.as_ref().map(|v| v.kind)
    }
}

fn survey_one(shape: MatrixShape, ids: &[usize], cfg: &AnalyzeConfig, quick: bool) -> SurveyEntry {
    let start = Instant::now();
    let failed = |labels: String, e: String| SurveyEntry {
        arrangement: ids.to_vec(),
        labels,
        verdict: None,
        ar: Vec::new(),
        generator_degrees: Vec::new(),
        signature: None,
        fingerprint_class: false,
        nearly_free_consistent: None,
        certificate: None,
        error: Some(e),
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    let arr = match Arrangement::new(shape, ids) {
        Ok(a) => a,
        Err(e) => return failed(format!("{ids:?}"), e.to_string()),
    };
    let analysis = match analyze(&arr, cfg) {
        Ok(a) => a,
        Err(e) => return failed(arr.label_string(), e.to_string()),
    };
    let verdict = VerdictRecord::from_analysis(&analysis);
    let ar = analysis.dims.certified_ar();
    let signature = SignatureKey::new(&ar, verdict.kind);
    let certificate = analysis
        .verdict
        .certificate()
        .map(|c| CertificateFile::from_certificate(c, verdict.basis));
    SurveyEntry {
        arrangement: arr.ids(),
        labels: arr.label_string(),
        ar: ar.clone(),
        generator_degrees: analysis.generators.ar_degrees(),
        fingerprint_class: signature.in_fingerprint_class(quick),
        nearly_free_consistent: Some(nearly_free_fit(&ar, arr.nvars()) == Consistency::Consistent),
        signature: Some(signature),
        verdict: Some(verdict),
        certificate,
        error: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureCount {
    pub signature: SignatureKey,
    pub count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyTotals {
    pub analyzed: usize,
    pub certified_free: usize,
    pub not_free: usize,
    pub not_free_by_degree_count: usize,
    pub undetermined: usize,
    pub errors: usize,
    pub fingerprint_class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub schema_version: u32,
    pub shape: String,
    pub family: Family,
    pub quick: bool,
    pub config: ConfigEcho,
    pub config_hash: String,
    pub entries: Vec<SurveyEntry>,
    pub signatures: Vec<SignatureCount>,
    pub totals: SurveyTotals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
    pub elapsed_ms: u64,
    /// Entries taken from the checkpoint rather than recomputed.
    pub resumed: usize,
}

impl SurveyReport {
    pub fn free_sets(&self) -> Vec<Vec<usize>> {
        self.entries
            .iter()
            .filter(|e| e.kind() == Some(VerdictKind::CertifiedFree))
            .map(|e| e.arrangement.clone())
            .collect()
    }

    pub fn fingerprint_sets(&self) -> Vec<Vec<usize>> {
        self.entries
            .iter()
            .filter(|e| e.fingerprint_class)
            .map(|e| e.arrangement.clone())
            .collect()
    }

    /// Everything except wall-clock timings.
    pub fn untimed(&self) -> SurveyReport {
        SurveyReport {
            entries: self.entries.iter().map(SurveyEntry::untimed).collect(),
            elapsed_ms: 0,
            resumed: 0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String, FileError> {
        canonical_json(self)
    }

    /// One row per signature: `z0, ar1..ar4, verdict, count`; empty cells
    /// for degrees that were not computed.
    pub fn write_signature_csv<W: Write>(&self, out: W) -> Result<(), FileError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["z0", "ar1", "ar2", "ar3", "ar4", "verdict", "count"])?;
        let cell = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        for s in &self.signatures {
            let k = &s.signature;
            w.write_record([
                cell(k.z0),
                cell(k.ar[0]),
                cell(k.ar[1]),
                cell(k.ar[2]),
                cell(k.ar[3]),
                k.verdict.as_str().to_string(),
                s.count.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_line(&self) -> String {
        let t = &self.totals;
        let mut s = format!(
            "{} analyzed, {} free, {} not free, {} undetermined",
            t.analyzed, t.certified_free, t.not_free, t.undetermined
        );
        if t.fingerprint_class > 0 {
            s.push_str(&format!(", {} fingerprint-class", t.fingerprint_class));
        }
        if t.errors > 0 {
            s.push_str(&format!(", {} errors", t.errors));
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    config_hash: String,
}

fn load_checkpoint(path: &Path, hash: &str) -> Result<HashMap<Vec<usize>, SurveyEntry>, SurveyError> {
    let mut done = HashMap::new();
    let Ok(file) = File::open(path) else {
        return Ok(done);
    };
    let mut lines = BufReader::new(file).lines();
    let Some(header) = lines.next().transpose().map_err(FileError::from)? else {
        return Ok(done);
    };
    let header: CheckpointHeader = serde_json::from_str(&header).map_err(FileError::from)?;
    if header.config_hash != hash {
        return Err(SurveyError::CheckpointMismatch {
            found: header.config_hash,
            expected: hash.to_string(),
        });
    }
    for line in lines {
        let line = line.map_err(FileError::from)?;
        // a torn final line from an interrupted run is simply recomputed
        if let Ok(entry) = serde_json::from_str::<SurveyEntry>(&line) {
            done.insert(entry.arrangement.clone(), entry);
        }
    }
    Ok(done)
}

/// Analyzes every member of the family. Per-arrangement failures are
/// recorded in the entries and never abort the survey.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyReport, SurveyError> {
    let start = Instant::now();
    let members = cfg.members()?;
    let analyze_cfg = cfg.effective_analyze();
    let hash = cfg.config_hash();

    let mut done = match &cfg.checkpoint {
        Some(path) => load_checkpoint(path, &hash)?,
        None => HashMap::new(),
    };
    let resumed = members.iter().filter(|m| done.contains_key(*m)).count();
    let writer = match &cfg.checkpoint {
        Some(path) => {
            let fresh = done.is_empty();
            let mut f = OpenOptions::new()
                .create(true)
                .append(!fresh)
                .write(true)
                .truncate(fresh)
                .open(path)
                .map_err(FileError::from)?;
            if fresh {
                let header = serde_json::to_string(&CheckpointHeader {
                    config_hash: hash.clone(),
                })
                .map_err(FileError::from)?;
                writeln!(f, "{header}").map_err(FileError::from)?;
            }
            Some(Mutex::new(f))
        }
        None => None,
    };

    let todo: Vec<&Vec<usize>> = members.iter().filter(|m| !done.contains_key(*m)).collect();
    let work = || -> Vec<SurveyEntry> {
        todo.par_iter()
            .map(|ids| {
                let entry = survey_one(cfg.shape, ids, &analyze_cfg, cfg.quick);
                if let Some(w) = &writer {
                    if let Ok(line) = serde_json::to_string(&entry) {
                        let mut f = w.lock().expect("checkpoint lock");
                        let _ = writeln!(f, "{line}");
                    }
                }
                entry
            })
            .collect()
    };
    let fresh = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SurveyError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    };
    for e in fresh {
        done.insert(e.arrangement.clone(), e);
    }
    let entries: Vec<SurveyEntry> = members
        .iter()
        .map(|m| done.remove(m).expect("every member analyzed"))
        .collect();

    let mut counts: BTreeMap<SignatureKey, usize> = BTreeMap::new();
    let mut totals = SurveyTotals::default();
    for e in &entries {
        totals.analyzed += 1;
        if let Some(s) = &e.signature {
            *counts.entry(s.clone()).or_default() += 1;
        }
        totals.fingerprint_class += usize::from(e.fingerprint_class);
        match e.kind() {
            Some(VerdictKind::CertifiedFree) => totals.certified_free += 1,
            Some(VerdictKind::NotFreeByDegreeCount) => {
                totals.not_free += 1;
                totals.not_free_by_degree_count += 1;
            }
            Some(VerdictKind::NotFreeByGradedObstruction) => totals.not_free += 1,
            Some(VerdictKind::Undetermined) => totals.undetermined += 1,
            None => totals.errors += 1,
        }
    }
    let caveat = cfg.quick.then(|| {
        "quick mode: signatures stop at degree 2, so the fingerprint class is only matched on its degree 1..2 prefix".to_string()
    });
    Ok(SurveyReport {
        schema_version: REPORT_VERSION,
        shape: cfg.shape.to_string(),
        family: cfg.family.clone(),
        quick: cfg.quick,
        config: (&analyze_cfg).into(),
        config_hash: hash,
        entries,
        signatures: counts
            .into_iter()
            .map(|(signature, count)| SignatureCount { signature, count })
            .collect(),
        totals,
        caveat,
        elapsed_ms: start.elapsed().as_millis() as u64,
        resumed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::binomial;

    #[test]
    fn subset_counts_and_order() {
        for k in 1..=10 {
            let all = enumerate_arrangements(k).unwrap();
            assert_eq!(all.len(), binomial(10, k));
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(enumerate_arrangements(3).unwrap().len(), 120);
        assert_eq!(enumerate_arrangements(10).unwrap(), vec![(1..=10).collect::<Vec<_>>()]);
        assert!(enumerate_arrangements(0).is_err());
        assert!(enumerate_arrangements(11).is_err());
    }

    #[test]
    fn k3_all_by_degree_count() {
        let r = run_survey(&SurveyConfig::subsets(3)).unwrap();
        assert_eq!(r.totals.analyzed, 120);
        assert_eq!(r.totals.not_free_by_degree_count, 120);
        assert_eq!(r.signatures.iter().map(|s| s.count).sum::<usize>(), 120);
    }

    #[test]
    fn experimental_gate() {
        assert!(matches!(
            run_survey(&SurveyConfig::subsets(5)),
            Err(SurveyError::Experimental(5))
        ));
    }

    #[test]
    fn checkpoint_resume_matches() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k3.jsonl");
        let cfg = SurveyConfig {
            checkpoint: Some(path.clone()),
            ..SurveyConfig::subsets(3)
        };
        let first = run_survey(&cfg).unwrap();
        let second = run_survey(&cfg).unwrap();
        assert_eq!(second.resumed, 120);
        assert_eq!(first.untimed(), second.untimed());
        let other = SurveyConfig { quick: true, ..cfg };
        assert!(matches!(
            run_survey(&other),
            Err(SurveyError::CheckpointMismatch { .. })
        ));
    }

    #[test]
    fn four_subset_orbits() {
        let all = enumerate_arrangements(4).unwrap();
        let orbits = orbit_decomposition(MatrixShape::DEFAULT, &all).unwrap();
        let mut sizes: Vec<usize> = orbits.iter().map(|o| o.1).collect();
        sizes.sort_unstable();
        assert_eq!(sizes.iter().sum::<usize>(), 210);
        assert_eq!(sizes, vec![5, 10, 15, 60, 60, 60]);
        let free = column_orbit(MatrixShape::DEFAULT, &[1, 2, 3, 4]).unwrap();
        assert_eq!(
            free,
            vec![
                vec![1, 2, 3, 4],
                vec![1, 5, 6, 7],
                vec![2, 5, 8, 9],
                vec![3, 6, 8, 10],
                vec![4, 7, 9, 10]
            ]
        );
    }

    #[test]
    fn signature_key_slots() {
        let k = SignatureKey::new(&[0, 15, 225, 1800, 10199], VerdictKind::NotFreeByGradedObstruction);
        assert!(k.in_fingerprint_class(false));
        let q = SignatureKey::new(&[0, 15, 225], VerdictKind::Undetermined);
        assert!(q.in_fingerprint_class(true));
        assert!(!q.in_fingerprint_class(false));
    }
}
