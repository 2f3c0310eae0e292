//! Saito's criterion: `N` tangent derivations, the Euler derivation among
//! them, form a basis of `D(C)` exactly when the determinant of their
//! coefficient matrix is a nonzero constant multiple of the defining
//! polynomial.

pub mod det;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::field::mul_mod;
use crate::algebra::{lift_rational, random_primes, Field, Polynomial, PrimeField, QPoly, Rationals};
use crate::error::CertifyError;
use crate::graded::arrangement_seed;
use crate::model::{Arrangement, QDerivation};

pub use det::{det_mod, det_subset_dp};

/// Coefficient matrix with the Euler derivation in column 0. Entry `(u, j)`
/// is the coefficient of `∂_u` in column derivation `j`.
#[derive(Clone, Debug)]
pub struct SaitoMatrix {
    columns: Vec<QDerivation>,
}

impl SaitoMatrix {
    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &QPoly {
        self.columns[col].coefficient(row)
    }

    pub fn columns(&self) -> &[QDerivation] {
        &self.columns
    }

    /// Degrees of the columns, Euler first; zero columns count as degree 0.
    pub fn column_degrees(&self) -> Vec<u32> {
        self.columns.iter().map(|d| d.degree().unwrap_or(0)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<QPoly>> {
        let n = self.size();
        (0..n)
            .map(|r| (0..n).map(|c| self.entry(r, c).clone()).collect())
            .collect()
    }

    /// Entries evaluated at a point modulo `p`; `None` if a denominator vanishes.
    pub fn evaluate_mod(&self, p: &PrimeField, point: &[u64]) -> Option<Vec<Vec<u64>>> {
        let reduced: Vec<Polynomial<PrimeField>> = self
            .columns
            .iter()
            .flat_map(|d| d.coefficients().iter().map(|a| a.reduce_mod(p)))
            .collect::<Option<_>>()?;
        let n = self.size();
        let mut m = vec![vec![0u64; n]; n];
        for c in 0..n {
            for r in 0..n {
                m[r][c] = reduced[c * n + r].evaluate(point).expect("point length");
            }
        }
        Some(m)
    }
}

/// Prepends the Euler derivation to `derivs`, which must number `N - 1`.
pub fn saito_matrix(arr: &Arrangement, derivs: &[QDerivation]) -> Result<SaitoMatrix, CertifyError> {
    let n = arr.nvars();
    if derivs.len() != n - 1 {
        return Err(CertifyError::Count {
            expected: n - 1,
            got: derivs.len(),
        });
    }
    let mut columns = Vec::with_capacity(n);
    columns.push(QDerivation::euler(arr.vars()));
    columns.extend(derivs.iter().cloned());
    Ok(SaitoMatrix { columns })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PitConfig {
    pub primes: usize,
    pub points_per_prime: usize,
    pub prime_bits: u32,
    pub seed: u64,
    /// Draws allowed per point before giving up on finding `F(ξ) != 0`.
    pub max_resample: usize,
}

impl Default for PitConfig {
    fn default() -> Self {
        PitConfig {
            primes: 2,
            points_per_prime: 4,
            prime_bits: 62,
            seed: 20240607,
            max_resample: 64,
        }
    }
}

/// Randomness and failure bound behind a probabilistic certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PitEvidence {
    pub primes: Vec<u64>,
    pub points_per_prime: usize,
    pub seed: u64,
    /// `log2` of an upper bound on the probability that a false identity passes.
    pub error_bound_log2: i64,
}

fn ceil_log2(x: usize) -> i64 {
    (usize::BITS - x.saturating_sub(1).leading_zeros()) as i64
}

/// Failure bound: after the first point fixes `c`, each further point passes
/// a false identity with probability at most `deg F / p`.
pub fn pit_error_bound_log2(deg_f: usize, primes: &[u64], points_per_prime: usize) -> i64 {
    let min_bits = primes.iter().map(|p| 63 - p.leading_zeros() as i64).min().unwrap_or(0);
    let trials = (primes.len() * points_per_prime.saturating_sub(1)) as i64;
    trials * (ceil_log2(deg_f) - min_bits)
}

fn degree_sum_check(arr: &Arrangement, derivs: &[QDerivation]) -> Result<(), CertifyError> {
    let got: usize = derivs.iter().map(|d| d.degree().unwrap_or(0) as usize).sum();
    let expected = arr.degree() - 1;
    if got != expected || derivs.iter().any(QDerivation::is_zero) {
        return Err(CertifyError::DegreeSum { expected, got });
    }
    Ok(())
}

/// Monte Carlo check of `det Φ = c F`, returning `c`.
pub fn pit_certify(
    arr: &Arrangement,
    derivs: &[QDerivation],
    cfg: &PitConfig,
) -> Result<(BigRational, PitEvidence), CertifyError> {
    if cfg.primes < 2 || cfg.points_per_prime < 2 {
        return Err(CertifyError::Determinant(
            "need at least two primes and two points per prime".into(),
        ));
    }
    let mat = saito_matrix(arr, derivs)?;
    degree_sum_check(arr, derivs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(arrangement_seed(cfg.seed, arr, "pit"));
    let primes = random_primes(&mut rng, cfg.primes, cfg.prime_bits);
    let streams: Vec<u64> = primes.iter().map(|_| rng.gen()).collect();
    let n = arr.nvars();

    let residues: Vec<(u64, u64)> = primes
        .par_iter()
        .zip(streams)
        .map(|(field, stream)| {
            let p = field.modulus();
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            let mut ratio: Option<u64> = None;
            for _ in 0..cfg.points_per_prime {
                let mut attempt = 0;
                let (point, f_val) = loop {
                    let point: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
                    let f_val = arr.evaluate_mod(field, &point);
                    if f_val != 0 {
                        break (point, f_val);
                    }
                    attempt += 1;
                    if attempt >= cfg.max_resample {
                        return Err(CertifyError::Determinant(
                            "every sampled point lies on the arrangement".into(),
                        ));
                    }
                };
                let m = mat
                    .evaluate_mod(field, &point)
                    .ok_or_else(|| CertifyError::Determinant(format!("prime {p} divides a denominator")))?;
                let det = det_mod(m, p);
                if det == 0 {
                    return Err(CertifyError::Determinant(
                        "Saito determinant vanishes at a sample point".into(),
                    ));
                }
                let r = mul_mod(det, field.inv(&f_val).expect("nonzero"), p);
                match ratio {
                    None => ratio = Some(r),
                    Some(prev) if prev != r => {
                        return Err(CertifyError::Determinant(
                            "det/F is not constant across points: not a basis".into(),
                        ))
                    }
                    _ => {}
                }
            }
            Ok((ratio.expect("at least one point"), p))
        })
        .collect::<Result<_, _>>()?;

    let c = lift_rational(&residues)
        .map_err(|e| CertifyError::Determinant(e.to_string()))?
        .ok_or_else(|| CertifyError::Determinant("constant did not reconstruct".into()))?;
    let prime_values: Vec<u64> = primes.iter().map(PrimeField::modulus).collect();
    let evidence = PitEvidence {
        error_bound_log2: pit_error_bound_log2(arr.degree(), &prime_values, cfg.points_per_prime),
        primes: prime_values,
        points_per_prime: cfg.points_per_prime,
        seed: cfg.seed,
    };
    Ok((c, evidence))
}

/// Default limit on live terms in the exact determinant.
pub const EXACT_TERM_BUDGET: usize = 50_000_000;

pub fn exact_det(mat: &SaitoMatrix, budget: usize) -> Result<QPoly, CertifyError> {
    det_subset_dp(&mat.rows(), budget).map_err(|_| CertifyError::Budget(budget))
}

/// Exact check of `det Φ = c F`; returns `c` and the SHA-256 of the
/// determinant's text form.
pub fn exact_certify(
    arr: &Arrangement,
    derivs: &[QDerivation],
    budget: usize,
) -> Result<(BigRational, String), CertifyError> {
    let mat = saito_matrix(arr, derivs)?;
    degree_sum_check(arr, derivs)?;
    let det = exact_det(&mat, budget)?;
    let f = arr.expand_defining();
    let (m, lead) = f.leading_term().expect("nonzero product").clone();
    let c = Rationals.mul(&det.coefficient(&m), &Rationals.inv(&lead).expect("nonzero"));
    if c.is_zero() || det != f.scale(&c) {
        return Err(CertifyError::Determinant(
            "determinant is not a constant multiple of F".into(),
        ));
    }
    let hash = hex_digest(det.to_string().as_bytes());
    Ok((c, hash))
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SaitoMode {
    Pit,
    Exact,
}

/// How the determinant identity was checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Probabilistic(PitEvidence),
    /// SHA-256 of the expanded determinant.
    Exact {
        identity_hash: String,
    },
}

/// Verified freeness certificate.
#[derive(Clone, Debug)]
pub struct SaitoCertificate {
    pub arrangement: Arrangement,
    /// Derivations in the order and scaling they were certified with.
    pub derivations: Vec<QDerivation>,
    pub constant: BigRational,
    pub evidence: Evidence,
}

impl SaitoCertificate {
    /// Exponents in ascending order.
    pub fn exponents(&self) -> Vec<u32> {
        let mut e: Vec<u32> = self.derivations.iter().map(|d| d.degree().unwrap_or(0)).collect();
        e.sort_unstable();
        e
    }

    pub fn abs_constant(&self) -> BigRational {
        self.constant.abs()
    }

    /// Constant for the same derivations rescaled so that each first nonzero
    /// coefficient is one. Independent of the scaling of the stored basis.
    pub fn normalized_constant(&self) -> BigRational {
        self.derivations.iter().fold(self.constant.clone(), |c, d| {
            c / d.first_nonzero().expect("nonzero derivation").clone()
        })
    }

    pub fn mode(&self) -> SaitoMode {
        match self.evidence {
            Evidence::Probabilistic(_) => SaitoMode::Pit,
            Evidence::Exact { .. } => SaitoMode::Exact,
        }
    }

    /// Re-checks tangency, degrees and the determinant from scratch. The
    /// probabilistic mode draws fresh points from `seed`. Succeeds only if the
    /// recomputed constant equals the stored one.
    pub fn verify(&self, seed: u64) -> Result<(), CertifyError> {
        let mode = match &self.evidence {
            Evidence::Probabilistic(ev) => CertifyMode::Pit(PitConfig {
                primes: ev.primes.len().max(2),
                points_per_prime: ev.points_per_prime.max(2),
                seed,
                ..PitConfig::default()
            }),
            Evidence::Exact { .. } => CertifyMode::Exact {
                budget: EXACT_TERM_BUDGET,
            },
        };
        let fresh = certify_free(&self.arrangement, &self.derivations, &mode)?;
        if fresh.constant != self.constant {
            return Err(CertifyError::Determinant(format!(
                "recomputed constant {} differs from the stored {}",
                fresh.constant, self.constant
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifyMode {
    Pit(PitConfig),
    Exact { budget: usize },
}

impl Default for CertifyMode {
    fn default() -> Self {
        CertifyMode::Pit(PitConfig::default())
    }
}

/// Tangency, degree sum, then the determinant identity.
pub fn certify_free(
    arr: &Arrangement,
    derivs: &[QDerivation],
    mode: &CertifyMode,
) -> Result<SaitoCertificate, CertifyError> {
    let n = arr.nvars();
    if derivs.len() != n - 1 {
        return Err(CertifyError::Count {
            expected: n - 1,
            got: derivs.len(),
        });
    }
    for (i, d) in derivs.iter().enumerate() {
        if let Err(fail) = d.tangent_to(arr) {
            return Err(CertifyError::Tangency(format!("derivation {}: {}", i + 1, fail)));
        }
    }
    degree_sum_check(arr, derivs)?;
    let derivations = derivs.to_vec();
    let (constant, evidence) = match mode {
        CertifyMode::Pit(cfg) => {
            let (c, ev) = pit_certify(arr, &derivations, cfg)?;
            (c, Evidence::Probabilistic(ev))
        }
        CertifyMode::Exact { budget } => {
            let (c, identity_hash) = exact_certify(arr, &derivations, *budget)?;
            (c, Evidence::Exact { identity_hash })
        }
    };
    Ok(SaitoCertificate {
        arrangement: arr.clone(),
        derivations,
        constant,
        evidence,
    })
}

/// Constant `c` for the derivations exactly as given (no normalization).
pub fn saito_constant(arr: &Arrangement, derivs: &[QDerivation], cfg: &PitConfig) -> Result<BigRational, CertifyError> {
    pit_certify(arr, derivs, cfg).map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{paper_basis, PaperBasisId};

    fn thm_a() -> (Arrangement, Vec<QDerivation>) {
        (
            Arrangement::from_ids(&[1, 2, 3, 4, 5]).unwrap(),
            paper_basis(PaperBasisId::ThmA(5)).unwrap(),
        )
    }

    #[test]
    fn five_minor_constant() {
        let (arr, basis) = thm_a();
        let c = saito_constant(&arr, &basis, &PitConfig::default()).unwrap();
        assert_eq!(c.abs(), BigRational::from_integer(9375.into()));
    }

    #[test]
    fn printed_matrix_entries() {
        let (arr, basis) = thm_a();
        let m = saito_matrix(&arr, &basis).unwrap();
        let vars = arr.vars();
        assert_eq!(m.entry(0, 0), &QPoly::variable(Rationals, vars.clone(), 0));
        assert_eq!(m.entry(0, 1), &QPoly::variable(Rationals, vars.clone(), 10));
        assert_eq!(m.column_degrees().iter().sum::<u32>(), 15);
    }

    #[test]
    fn duplicated_column_is_refused() {
        let (arr, mut basis) = thm_a();
        basis[1] = basis[0].clone();
        let err = saito_constant(&arr, &basis, &PitConfig::default()).unwrap_err();
        assert!(matches!(err, CertifyError::Determinant(_)));
    }

    #[test]
    fn permuting_columns_keeps_abs_constant() {
        let (arr, mut basis) = thm_a();
        let c0 = saito_constant(&arr, &basis, &PitConfig::default()).unwrap();
        basis.swap(2, 7);
        let c1 = saito_constant(&arr, &basis, &PitConfig::default()).unwrap();
        assert_eq!(c0, -c1);
    }

    #[test]
    fn scaling_a_column_scales_constant() {
        let (arr, mut basis) = thm_a();
        let c0 = saito_constant(&arr, &basis, &PitConfig::default()).unwrap();
        let lambda = BigRational::new(3.into(), 7.into());
        basis[4] = basis[4].scale(&lambda);
        let c1 = saito_constant(&arr, &basis, &PitConfig::default()).unwrap();
        assert_eq!(c1, c0 * lambda);
    }

    #[test]
    fn certificate_and_error_bound() {
        let (arr, basis) = thm_a();
        let cert = certify_free(&arr, &basis, &CertifyMode::default()).unwrap();
        assert_eq!(cert.exponents(), vec![1; 14]);
        assert_eq!(cert.abs_constant(), BigRational::from_integer(9375.into()));
        let Evidence::Probabilistic(ev) = &cert.evidence else {
            panic!()
        };
        assert!(ev.error_bound_log2 < -100);
        cert.verify(99).unwrap();
        let normalized: Vec<QDerivation> = basis.iter().map(QDerivation::normalized).collect();
        let again = certify_free(&arr, &normalized, &CertifyMode::default()).unwrap();
        assert_eq!(again.constant, cert.normalized_constant());
        assert_eq!(again.normalized_constant(), cert.normalized_constant());
    }

    #[test]
    fn degree_sum_refusal() {
        let arr = Arrangement::from_ids(&[1, 2, 3, 4, 5, 6]).unwrap();
        let (_, basis) = thm_a();
        let err = pit_certify(&arr, &basis, &PitConfig::default()).unwrap_err();
        assert_eq!(err, CertifyError::DegreeSum { expected: 17, got: 14 });
    }

    #[test]
    fn six_minor_constant() {
        let arr = Arrangement::from_ids(&[1, 2, 3, 4, 5, 7]).unwrap();
        let basis = paper_basis(PaperBasisId::Mid(7)).unwrap();
        let m = saito_matrix(&arr, &basis).unwrap();
        assert_eq!(m.column_degrees().iter().sum::<u32>(), 18);
        let c = saito_constant(&arr, &basis, &PitConfig::default()).unwrap();
        assert_eq!(c.abs(), BigRational::from_integer(23328.into()));
    }

    #[test]
    fn exact_mode_agrees() {
        let (arr, basis) = thm_a();
        let t = std::time::Instant::now();
        let exact = certify_free(
            &arr,
            &basis,
            &CertifyMode::Exact {
                budget: EXACT_TERM_BUDGET,
            },
        )
        .unwrap();
        eprintln!("exact det took {:?}", t.elapsed());
        let pit = certify_free(&arr, &basis, &CertifyMode::default()).unwrap();
        assert_eq!(exact.constant, pit.constant);
    }

    #[test]
    fn error_bound_formula() {
        let p = (1u64 << 61) + 1;
        assert_eq!(pit_error_bound_log2(30, &[p, p], 4), 6 * (5 - 61));
    }
}
