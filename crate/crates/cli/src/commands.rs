use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use detfree::analyzer::{analyze, shape_consistency, AnalyzeConfig, Consistency, ShapeHypothesis, VerdictKind};
use detfree::files::{
    canonical_json, read_certificate, singular_script, verify_certificate_file, write_certificate, AnalysisRecord,
    AnalyzeReport,
};
use detfree::graded::{minimal_generators, SearchConfig};
use detfree::model::{paper_basis, parse_basis_file, Arrangement, MatrixShape, PaperBasisId, QDerivation};
use detfree::saito::{certify_free, CertifyMode, PitConfig, EXACT_TERM_BUDGET};
use detfree::survey::{paper_reproduction_suite, run_survey, Family, SuiteOptions, SurveyConfig};

use crate::{
    BasisArg, Cli, Command, Failure, Format, GlobalOpts, Mode, EXIT_CHECK_FAILED, EXIT_FREE, EXIT_NOT_FREE,
    EXIT_UNDETERMINED,
};

type Outcome = Result<u8, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Minors => minors(g),
        Command::Analyze {
            factors,
            certify,
            basis,
            report,
            full_depth,
            no_extend,
        } => {
            let mut cfg = analyze_config(g);
            cfg.basis = (*basis).into();
            cfg.full_depth = *full_depth;
            cfg.extend = !*no_extend;
            analyze_cmd(g, factors, &cfg, certify.as_deref(), report.as_deref())
        }
        Command::Certify {
            factors,
            basis,
            derivations,
            out,
        } => certify_cmd(g, factors, *basis, derivations.as_deref(), out),
        Command::Verify { path } => verify_cmd(g, path),
        Command::Survey {
            k,
            quick,
            out,
            csv,
            checkpoint,
        } => {
            let cfg = SurveyConfig {
                shape: g.shape,
                analyze: analyze_config(g),
                quick: *quick,
                threads: g.threads,
                experimental: g.experimental,
                checkpoint: checkpoint.clone(),
                ..SurveyConfig::subsets(*k)
            };
            survey_cmd(g, &cfg, out.as_deref(), csv.as_deref())
        }
        Command::Reproduce { quick, out } => reproduce_cmd(g, *quick, out.as_deref()),
        Command::EmitCrosscheck {
            factors,
            out,
            certificate,
        } => crosscheck_cmd(g, factors, out, certificate.as_deref()),
    }
}

/// Parses `1,2,5`, `1..10` or a mix such as `1..3,7`.
pub fn parse_factors(s: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: usize = a
                    .trim()
                    .parse()
                    .with_context(|| format!("bad range start in {part:?}"))?;
                let b: usize = b
                    .trim()
                    .trim_start_matches('=')
                    .parse()
                    .with_context(|| format!("bad range end in {part:?}"))?;
                if a > b {
                    return Err(anyhow!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().with_context(|| format!("bad factor label {part:?}"))?),
        }
    }
    if out.is_empty() {
        return Err(anyhow!("no factors given"));
    }
    Ok(out)
}

fn arrangement(g: &GlobalOpts, factors: &str) -> Result<Arrangement, Failure> {
    let ids = parse_factors(factors).map_err(Failure::usage)?;
    Arrangement::new(g.shape, &ids).map_err(Failure::usage)
}

fn search_config(g: &GlobalOpts) -> SearchConfig {
    SearchConfig {
        d_max: g.max_degree,
        primes: g.primes,
        prime_bits: g.prime_bits,
        seed: g.seed,
        ..SearchConfig::default()
    }
}

fn certify_mode(g: &GlobalOpts) -> CertifyMode {
    match g.mode {
        Mode::Pit => CertifyMode::Pit(PitConfig {
            primes: g.primes.max(2),
            prime_bits: g.prime_bits,
            seed: g.seed,
            ..PitConfig::default()
        }),
        Mode::Exact => CertifyMode::Exact {
            budget: EXACT_TERM_BUDGET,
        },
    }
}

fn analyze_config(g: &GlobalOpts) -> AnalyzeConfig {
    AnalyzeConfig {
        search: search_config(g),
        mode: certify_mode(g),
        ..AnalyzeConfig::default()
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::data)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Failure> {
    print!("{}", canonical_json(value).map_err(Failure::internal)?);
    Ok(())
}

fn minors(g: &GlobalOpts) -> Outcome {
    let arr = Arrangement::full(g.shape);
    match g.format {
        Format::Table => {
            for (label, f) in arr.labels().iter().zip(arr.factors()) {
                let cols: Vec<String> = label.columns().iter().map(ToString::to_string).collect();
                println!("{label} [{}] = {f}", cols.join(","));
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = arr
                .labels()
                .iter()
                .zip(arr.factors())
                .map(|(l, f)| serde_json::json!({"label": l.to_string(), "columns": l.columns(), "polynomial": f.to_string()}))
                .collect();
            print_json(&rows)?;
        }
    }
    Ok(EXIT_FREE)
}

fn is_full_default(arr: &Arrangement) -> bool {
    arr.shape() == MatrixShape::DEFAULT && arr.ids().len() == arr.shape().minor_count()
}

fn analyze_cmd(
    g: &GlobalOpts,
    factors: &str,
    cfg: &AnalyzeConfig,
    certify: Option<&Path>,
    report: Option<&Path>,
) -> Outcome {
    let arr = arrangement(g, factors)?;
    let experimental = is_full_default(&arr);
    if experimental && !g.experimental {
        return Err(Failure::usage(anyhow!(
            "the full arrangement of all ten minors is an open case; pass --experimental to collect graded evidence"
        )));
    }
    let analysis = analyze(&arr, cfg).map_err(Failure::usage)?;
    let record = AnalysisRecord::from_analysis(&analysis);
    if let Some(path) = report {
        write_text(
            path,
            &canonical_json(&AnalyzeReport::new(cfg, std::slice::from_ref(&analysis))).map_err(Failure::internal)?,
        )?;
    }
    if let (Some(path), Some(cert)) = (certify, analysis.verdict.certificate()) {
        write_certificate(path, cert, record.verdict.basis).map_err(Failure::data)?;
    }
    if experimental {
        // evidence only: no verdict is claimed for the open case
        let conjectured: Vec<u32> = [vec![1; 9], vec![4; 5]].concat();
        let conjecture = ShapeHypothesis::Free(conjectured.clone());
        let consistency = shape_consistency(&record.ar, arr.nvars(), &conjecture);
        match g.format {
            Format::Json => print_json(&serde_json::json!({
                "experimental": true,
                "arrangement": record.arrangement,
                "ar": record.ar,
                "generator_degrees": record.generator_degrees,
                "conjecture": conjectured,
                "consistent_with_conjecture": consistency == Consistency::Consistent,
            }))?,
            Format::Table => {
                println!("experimental: {} (no verdict claimed)", record.labels);
                println!("certified dim AR_d: {:?}", record.ar);
                println!("generator degrees found: {:?}", record.generator_degrees);
                match consistency {
                    Consistency::Consistent => {
                        println!("consistent with exponents (1^9, 4^5) through the computed degrees")
                    }
                    Consistency::Inconsistent { degree } => {
                        println!("inconsistent with exponents (1^9, 4^5) at degree {degree}")
                    }
                }
            }
        }
        return Ok(EXIT_UNDETERMINED);
    }
    match g.format {
        Format::Json => print_json(&record)?,
        Format::Table => print_analysis(&record),
    }
    Ok(match analysis.verdict.kind() {
        VerdictKind::CertifiedFree => EXIT_FREE,
        VerdictKind::NotFreeByDegreeCount | VerdictKind::NotFreeByGradedObstruction => EXIT_NOT_FREE,
        VerdictKind::Undetermined => EXIT_UNDETERMINED,
    })
}

fn exponent_string(exps: &[u32]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < exps.len() {
        let j = exps[i..].iter().take_while(|&&e| e == exps[i]).count();
        parts.push(if j == 1 {
            exps[i].to_string()
        } else {
            format!("{}^{j}", exps[i])
        });
        i += j;
    }
    format!("({})", parts.join(", "))
}

fn print_analysis(r: &AnalysisRecord) {
    let v = &r.verdict;
    println!("arrangement  {} ({}, deg F = {})", r.labels, r.shape, r.deg_f);
    println!("verdict      {}", v.kind.as_str());
    if let Some(e) = &v.exponents {
        let tag = match v.exponents_provenance {
            Some(detfree::files::Provenance::Derived) => " (derived)",
            _ => "",
        };
        println!("exponents    {}{tag}", exponent_string(e));
    }
    if let Some(c) = &v.constant {
        println!("constant     {c}");
    }
    if let Some(reg) = v.regularity {
        println!("regularity   {reg}");
    }
    if let Some(reason) = &v.reason {
        println!("reason       {reason}");
    }
    println!("dim AR_d     {:?}", r.ar);
    println!("elapsed      {} ms", r.elapsed_ms);
}

fn certify_cmd(g: &GlobalOpts, factors: &str, basis: BasisArg, derivations: Option<&Path>, out: &Path) -> Outcome {
    let arr = arrangement(g, factors)?;
    let (derivs, source): (Vec<QDerivation>, _) = if let Some(path) = derivations {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::data)?;
        let (stated, named) = parse_basis_file(&text).map_err(Failure::data)?;
        if stated.ids() != arr.ids() || stated.shape() != arr.shape() {
            return Err(Failure::usage(anyhow!(
                "derivations file is stated for {}, not {}",
                stated.label_string(),
                arr.label_string()
            )));
        }
        (named.into_iter().map(|n| n.derivation).collect(), None)
    } else {
        let paper = PaperBasisId::for_arrangement(&arr);
        match (basis, paper) {
            (BasisArg::Paper | BasisArg::Auto, Some(id)) => (
                paper_basis(id).map_err(Failure::internal)?,
                Some(detfree::analyzer::BasisSource::Paper),
            ),
            (BasisArg::Paper, None) => {
                return Err(Failure::usage(anyhow!(
                    "no transcribed basis for {}",
                    arr.label_string()
                )))
            }
            _ => {
                let (_, gens) = minimal_generators(&arr, &search_config(g)).map_err(Failure::usage)?;
                (
                    gens.ar_generators().map(|x| x.derivation.clone()).collect(),
                    Some(detfree::analyzer::BasisSource::Lifted),
                )
            }
        }
    };
    match certify_free(&arr, &derivs, &certify_mode(g)) {
        Ok(cert) => {
            write_certificate(out, &cert, source).map_err(Failure::data)?;
            println!(
                "certified: exponents {}, c = {}",
                exponent_string(&cert.exponents()),
                cert.constant
            );
            Ok(EXIT_FREE)
        }
        Err(e) => {
            println!("not certified: {e}");
            Ok(EXIT_CHECK_FAILED)
        }
    }
}

fn verify_cmd(g: &GlobalOpts, path: &Path) -> Outcome {
    let file = read_certificate(path).map_err(Failure::data)?;
    // fresh randomness, independent of the seed that produced the file
    let seed = g.seed ^ 0x9e37_79b9_7f4a_7c15;
    let outcome = verify_certificate_file(&file, seed);
    match g.format {
        Format::Json => print_json(&outcome)?,
        Format::Table => match (&outcome.failed_stage, outcome.passed) {
            (_, true) => println!("PASS {}", outcome.detail),
            (Some(stage), false) => println!("FAIL at {stage:?}: {}", outcome.detail),
            (None, false) => println!("FAIL {}", outcome.detail),
        },
    }
    Ok(if outcome.passed { EXIT_FREE } else { EXIT_CHECK_FAILED })
}

fn survey_cmd(g: &GlobalOpts, cfg: &SurveyConfig, out: Option<&Path>, csv: Option<&Path>) -> Outcome {
    if let Family::Subsets(k) = cfg.family {
        if k == 0 || k > cfg.shape.minor_count() {
            return Err(Failure::usage(anyhow!("k must lie in 1..={}", cfg.shape.minor_count())));
        }
    }
    let report = run_survey(cfg).map_err(Failure::usage)?;
    if let Some(path) = out {
        write_text(path, &report.to_json().map_err(Failure::internal)?)?;
    }
    if let Some(path) = csv {
        let file = fs::File::create(path)
            .with_context(|| format!("creating {}", path.display()))
            .map_err(Failure::data)?;
        report.write_signature_csv(file).map_err(Failure::data)?;
    }
    match g.format {
        Format::Json => print_json(&report)?,
        Format::Table => {
            println!("{}", report.summary_line());
            println!(
                "{:>4} {:>6} {:>6} {:>6} {:>6}  {:<32} {:>5}",
                "z0", "AR1", "AR2", "AR3", "AR4", "verdict", "count"
            );
            let cell = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
            for s in &report.signatures {
                let k = &s.signature;
                println!(
                    "{:>4} {:>6} {:>6} {:>6} {:>6}  {:<32} {:>5}",
                    cell(k.z0),
                    cell(k.ar[0]),
                    cell(k.ar[1]),
                    cell(k.ar[2]),
                    cell(k.ar[3]),
                    k.verdict.as_str(),
                    s.count
                );
            }
            let free = report.free_sets();
            if !free.is_empty() {
                println!("free: {free:?}");
            }
            if let Some(c) = &report.caveat {
                println!("note: {c}");
            }
        }
    }
    Ok(EXIT_FREE)
}

fn reproduce_cmd(g: &GlobalOpts, quick: bool, out: Option<&Path>) -> Outcome {
    let opts = SuiteOptions {
        analyze: analyze_config(g),
        quick,
        threads: g.threads,
    };
    let entries = paper_reproduction_suite(&opts);
    if let Some(path) = out {
        write_text(path, &canonical_json(&entries).map_err(Failure::internal)?)?;
    }
    match g.format {
        Format::Json => print_json(&entries)?,
        Format::Table => {
            for e in &entries {
                let mark = if e.passed { "PASS" } else { "FAIL" };
                println!("{mark} [{}] {:<34} {}", e.criterion, e.name, e.observed);
                if !e.passed {
                    println!("      expected: {}", e.expected);
                }
            }
            let failed = entries.iter().filter(|e| !e.passed).count();
            println!("{} checks, {} failed", entries.len(), failed);
        }
    }
    Ok(if entries.iter().all(|e| e.passed) {
        EXIT_FREE
    } else {
        EXIT_CHECK_FAILED
    })
}

fn crosscheck_cmd(g: &GlobalOpts, factors: &str, out: &Path, certificate: Option<&Path>) -> Outcome {
    let arr = arrangement(g, factors)?;
    let cert = match certificate {
        Some(path) => {
            let file = read_certificate(path).map_err(Failure::data)?;
            let cert = file.to_certificate().map_err(Failure::data)?;
            if cert.arrangement.ids() != arr.ids() {
                return Err(Failure::usage(anyhow!("certificate is for a different arrangement")));
            }
            Some(cert)
        }
        None => None,
    };
    let script = singular_script(&arr, g.max_degree, cert.as_ref()).map_err(Failure::internal)?;
    write_text(out, &script)?;
    println!("wrote {}", out.display());
    Ok(EXIT_FREE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_lists() {
        assert_eq!(parse_factors("1,2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_factors("1..4,7").unwrap(), vec![1, 2, 3, 4, 7]);
        assert_eq!(parse_factors("1..=3").unwrap(), vec![1, 2, 3]);
        assert!(parse_factors("").is_err());
        assert!(parse_factors("3..1").is_err());
        assert!(parse_factors("a").is_err());
    }

    #[test]
    fn exponent_rendering() {
        assert_eq!(exponent_string(&[1; 14]), "(1^14)");
        assert_eq!(exponent_string(&[0, 0, 0, 1, 1, 4]), "(0^3, 1^2, 4)");
    }
}
