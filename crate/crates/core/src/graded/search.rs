//! Degree-by-degree search for tangent derivations with certified dimensions.
//!
//! At each degree the kernel dimension modulo a prime is an upper bound for
//! `dim D(C)_d` over the rationals. A lower bound comes from the rank, modulo
//! the same prime, of rationally verified elements: products of previously
//! found generators with monomials, plus new generators lifted from the
//! canonical modular basis and checked by exact tangency. The degree is
//! certified when the two bounds agree.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::linalg::{solve, solve_block, Echelon, ModularSolution};
use super::system::{euler_dimension, index_map, term_weight, TangencySystem};
use crate::algebra::{crt, monomials_of_degree, reconstruct, Monomial, PrimeField};
use crate::error::GradedError;
use crate::model::{Arrangement, QDerivation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Highest degree examined.
    pub d_max: u32,
    /// Primes drawn up front (at least two).
    pub primes: usize,
    pub prime_bits: u32,
    pub seed: u64,
    /// Most primes used for any one degree before giving up.
    pub prime_budget: usize,
    /// Refuse `d_max` above this.
    pub degree_budget: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            d_max: 4,
            primes: 2,
            prime_bits: 62,
            seed: 20240607,
            prime_budget: 8,
            degree_budget: 6,
        }
    }
}

/// Seed of the random stream for one arrangement.
pub fn arrangement_seed(seed: u64, arr: &Arrangement, stream: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(arr.to_string().as_bytes());
    h.update(stream.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Dimensions found at one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeDims {
    pub degree: u32,
    pub unknowns: usize,
    pub equations: usize,
    pub dim_d_lower: usize,
    pub dim_d_upper: usize,
    /// Number of primes that were solved at this degree.
    pub primes_used: usize,
    /// Some prime gave a smaller rank on some block than another.
    pub unstable: bool,
    /// New generators of `D(C)` found here (the Euler derivation included at degree one).
    pub new_generators: usize,
}

impl DegreeDims {
    pub fn certified(&self) -> bool {
        self.dim_d_lower == self.dim_d_upper
    }

    fn euler(&self, nvars: usize) -> usize {
        euler_dimension(nvars, self.degree)
    }

    /// `dim AR_d = dim D_d - dim S_{d-1}`, only when certified.
    pub fn dim_ar(&self, nvars: usize) -> Option<usize> {
        self.certified().then(|| self.dim_d_upper - self.euler(nvars))
    }

    /// Minimal generators of `AR` in this degree, only when certified.
    pub fn mu_ar(&self) -> Option<usize> {
        self.certified()
            .then(|| self.new_generators - usize::from(self.degree == 1))
    }
}

/// Graded dimensions of `D(C)` and `AR(F)` through some degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub nvars: usize,
    pub degrees: Vec<DegreeDims>,
    pub primes: Vec<u64>,
}

impl DimReport {
    pub fn degree(&self, d: u32) -> Option<&DegreeDims> {
        self.degrees.get(d as usize)
    }

    /// Certified `dim AR_d`.
    pub fn ar(&self, d: u32) -> Option<usize> {
        self.degree(d).and_then(|g| g.dim_ar(self.nvars))
    }

    pub fn z0(&self) -> Option<usize> {
        self.ar(0)
    }

    /// Highest degree `d` such that every degree up to `d` is certified.
    pub fn certified_through(&self) -> Option<u32> {
        let n = self.degrees.iter().take_while(|g| g.certified()).count();
        n.checked_sub(1).map(|d| d as u32)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.degrees.len().checked_sub(1).map(|d| d as u32)
    }

    /// Certified AR dimensions in degree order, up to the first uncertified one.
    pub fn certified_ar(&self) -> Vec<usize> {
        self.degrees.iter().map_while(|g| g.dim_ar(self.nvars)).collect()
    }
}

/// A rationally verified generator of `D(C)`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub degree: u32,
    pub derivation: QDerivation,
    pub euler: bool,
}

/// Minimal generators found degree by degree.
#[derive(Clone, Debug, Default)]
pub struct GeneratorSet {
    pub generators: Vec<Generator>,
}

impl GeneratorSet {
    /// Generators other than the Euler derivation, in discovery order.
    pub fn ar_generators(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(|g| !g.euler)
    }

    pub fn ar_degrees(&self) -> Vec<u32> {
        self.ar_generators().map(|g| g.degree).collect()
    }

    /// Minimal generator count of `AR` in degree `d`.
    pub fn mu(&self, d: u32) -> usize {
        self.ar_generators().filter(|g| g.degree == d).count()
    }
}

/// Result of lifting one candidate generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftOutcome {
    /// Global index of the free unknown the canonical vector is attached to.
    pub free_unknown: u32,
    pub reconstructed: bool,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftReport {
    pub degree: u32,
    pub primes: Vec<u64>,
    /// Bit length of the numerator and denominator bound at the final modulus.
    pub bound_bits: u64,
    pub outcomes: Vec<LiftOutcome>,
    pub gave_up: bool,
}

impl LiftReport {
    pub fn success(&self) -> bool {
        !self.gave_up && self.outcomes.iter().all(|o| o.verified)
    }
}

/// Sparse generator data used to form products with monomials.
#[derive(Clone, Debug)]
struct Terms(Vec<(usize, Monomial, BigRational)>);

/// Incremental graded search on one arrangement.
pub struct GradedSearch {
    arr: Arrangement,
    cfg: SearchConfig,
    rng: ChaCha8Rng,
    primes: Vec<PrimeField>,
    generators: Vec<(Generator, Terms)>,
    report: DimReport,
    lifts: Vec<LiftReport>,
}

impl GradedSearch {
    pub fn new(arr: &Arrangement, cfg: &SearchConfig) -> Result<Self, GradedError> {
        if cfg.d_max > cfg.degree_budget {
            return Err(GradedError::DegreeBudget {
                requested: cfg.d_max,
                budget: cfg.degree_budget,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(arrangement_seed(cfg.seed, arr, "graded"));
        let primes = crate::algebra::random_primes(&mut rng, cfg.primes.max(2), cfg.prime_bits);
        Ok(GradedSearch {
            arr: arr.clone(),
            cfg: cfg.clone(),
            rng,
            report: DimReport {
                nvars: arr.nvars(),
                degrees: Vec::new(),
                primes: primes.iter().map(PrimeField::modulus).collect(),
            },
            primes,
            generators: Vec::new(),
            lifts: Vec::new(),
        })
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arr
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn report(&self) -> &DimReport {
        &self.report
    }

    pub fn lifts(&self) -> &[LiftReport] {
        &self.lifts
    }

    pub fn generator_set(&self) -> GeneratorSet {
        GeneratorSet {
            generators: self.generators.iter().map(|(g, _)| g.clone()).collect(),
        }
    }

    /// Next degree to be computed.
    pub fn next_degree(&self) -> u32 {
        self.report.degrees.len() as u32
    }

    /// Whether every computed degree so far is certified.
    pub fn certified(&self) -> bool {
        self.report.degrees.iter().all(DegreeDims::certified)
    }

    fn fresh_prime(&mut self) -> PrimeField {
        loop {
            let p = crate::algebra::random_prime(&mut self.rng, self.cfg.prime_bits);
            if !self.primes.contains(&p) {
                self.primes.push(p);
                self.report.primes.push(p.modulus());
                return p;
            }
        }
    }

    /// Computes the next degree. Once a degree fails to certify, later
    /// degrees cannot be certified either, since their lower bounds rely on
    /// the generators of all lower degrees.
    pub fn step(&mut self) -> &DegreeDims {
        let d = self.next_degree();
        let sys = TangencySystem::build(&self.arr, d);
        let mut sols: Vec<ModularSolution> = self.primes.iter().map(|p| solve(&sys, p)).collect();
        let nblocks = sys.blocks().len();

        // reference prime: maximal rank on every block
        let mut unstable = false;
        let reference = loop {
            let best: Vec<usize> = (0..nblocks)
                .map(|b| sols.iter().map(|s| s.blocks[b].rank).max().unwrap_or(0))
                .collect();
            let agree = |s: &ModularSolution| (0..nblocks).all(|b| s.blocks[b].rank == best[b]);
            if !sols.iter().all(agree) {
                unstable = true;
            }
            match sols.iter().position(agree) {
                Some(r) if sols.iter().filter(|s| agree(s)).count() >= 2 => break Some(r),
                _ if sols.len() < self.cfg.prime_budget => {
                    let p = self.fresh_prime();
                    sols.push(solve(&sys, &p));
                }
                found => break found,
            }
        };
        let upper: usize = (0..nblocks)
            .map(|b| sols.iter().map(|s| s.blocks[b].nullity()).min().unwrap_or(0))
            .sum();

        let mut dims = DegreeDims {
            degree: d,
            unknowns: sys.unknowns(),
            equations: sys.equations(),
            dim_d_lower: 0,
            dim_d_upper: upper,
            primes_used: sols.len(),
            unstable,
            new_generators: 0,
        };
        let Some(r) = reference else {
            self.report.degrees.push(dims);
            return self.report.degrees.last().expect("pushed");
        };
        if d > 0 && !self.certified() {
            self.report.degrees.push(dims);
            return self.report.degrees.last().expect("pushed");
        }

        if d == 1 {
            let e = QDerivation::euler(self.arr.vars());
            let terms = Terms(e.triples());
            self.generators.push((
                Generator {
                    degree: 1,
                    derivation: e,
                    euler: true,
                },
                terms,
            ));
        }

        let field = sols[r].prime;
        let known = self.products(&sys, &field);
        let p = field.modulus();
        let reference_sol = &sols[r];
        let split = sys.derivation_unknowns();

        // per block: rank of known elements, then canonical vectors that enlarge it
        let selections: Vec<(Echelon, Vec<usize>)> = sys
            .blocks()
            .par_iter()
            .zip(&reference_sol.blocks)
            .zip(known)
            .map(|((block, bs), vectors)| {
                let nd = block.derivation_columns(split);
                let mut ech = Echelon::new(&field);
                for v in vectors {
                    if ech.rank() == bs.nullity() {
                        break;
                    }
                    ech.insert(v);
                }
                let mut trial = ech.clone();
                let mut chosen = Vec::new();
                for k in 0..bs.nullity() {
                    if trial.rank() == bs.nullity() {
                        break;
                    }
                    let mut v = bs.null_vector(k, p);
                    v.truncate(nd);
                    if trial.insert(v) {
                        chosen.push(k);
                    }
                }
                (ech, chosen)
            })
            .collect();

        let candidates: Vec<(usize, usize)> = selections
            .iter()
            .enumerate()
            .flat_map(|(b, (_, ks))| ks.iter().map(move |&k| (b, k)))
            .collect();
        let (lifted, report) = self.lift(&sys, &mut sols, r, &candidates);

        let mut echelons: Vec<Echelon> = selections.into_iter().map(|(e, _)| e).collect();
        let mut new_generators = 0;
        for ((b, _), derivation) in candidates.iter().zip(lifted) {
            let Some(derivation) = derivation else { continue };
            let block = &sys.blocks()[*b];
            let nd = block.derivation_columns(split);
            let terms = Terms(derivation.triples());
            let mut v = vec![0u64; nd];
            let md = sys.monomials().len();
            let index = index_map(sys.monomials());
            for (u, m, c) in &terms.0 {
                let col = (u * md) as u32 + index[m];
                let local = block.columns[..nd]
                    .binary_search(&col)
                    .expect("generator inside its block");
                v[local] = field.reduce_rational(c).expect("denominator prime to p");
            }
            if echelons[*b].insert(v) {
                new_generators += 1;
                self.generators.push((
                    Generator {
                        degree: d,
                        derivation,
                        euler: false,
                    },
                    terms,
                ));
            }
        }
        if d == 1 {
            new_generators += 1;
        }
        dims.dim_d_lower = echelons.iter().map(Echelon::rank).sum();
        dims.new_generators = new_generators;
        dims.primes_used = sols.len();
        if !candidates.is_empty() {
            self.lifts.push(report);
        }
        self.report.degrees.push(dims);
        self.report.degrees.last().expect("pushed")
    }

    /// Products of known generators with monomials, landing in degree
    /// `sys.degree()`, grouped by block and reduced modulo `field`.
    fn products(&self, sys: &TangencySystem, field: &PrimeField) -> Vec<Vec<Vec<u64>>> {
        let d = sys.degree();
        let shape = sys.shape();
        let nvars = shape.nvars();
        let md = sys.monomials().len();
        let index = index_map(sys.monomials());
        let split = sys.derivation_unknowns();
        let mut block_of: HashMap<[i8; 8], usize> = HashMap::new();
        for (b, block) in sys.blocks().iter().enumerate() {
            block_of.insert(block.weight, b);
        }
        let mut grouped: Vec<Vec<Vec<u64>>> = vec![Vec::new(); sys.blocks().len()];
        for (g, terms) in &self.generators {
            if g.degree > d {
                continue;
            }
            let reduced: Vec<(usize, Monomial, u64)> = terms
                .0
                .iter()
                .map(|(u, m, c)| (*u, *m, field.reduce_rational(c).expect("denominator prime to p")))
                .collect();
            let (u0, m0, _) = reduced[0];
            for mult in monomials_of_degree(nvars, (d - g.degree) as usize) {
                let w = term_weight(shape, &mult.mul(&m0), u0);
                let b = block_of[&w];
                let block = &sys.blocks()[b];
                let nd = block.derivation_columns(split);
                let mut v = vec![0u64; nd];
                for (u, m, c) in &reduced {
                    let col = (u * md) as u32 + index[&mult.mul(m)];
                    let local = block.columns[..nd].binary_search(&col).expect("homogeneous generator");
                    v[local] = *c;
                }
                grouped[b].push(v);
            }
        }
        grouped
    }

    /// Lifts the chosen canonical vectors to rational derivations and checks
    /// them exactly, drawing more primes when reconstruction or verification
    /// fails.
    fn lift(
        &mut self,
        sys: &TangencySystem,
        sols: &mut Vec<ModularSolution>,
        reference: usize,
        candidates: &[(usize, usize)],
    ) -> (Vec<Option<QDerivation>>, LiftReport) {
        let split = sys.derivation_unknowns();
        let mut results: Vec<Option<QDerivation>> = vec![None; candidates.len()];
        let mut outcomes: Vec<LiftOutcome> = candidates
            .iter()
            .map(|&(b, k)| LiftOutcome {
                free_unknown: sys.blocks()[b].columns[sols[reference].blocks[b].free[k]],
                reconstructed: false,
                verified: false,
            })
            .collect();
        let mut bound_bits = 0;
        loop {
            let mut pending = false;
            for (i, &(b, k)) in candidates.iter().enumerate() {
                if results[i].is_some() {
                    continue;
                }
                let block = &sys.blocks()[b];
                let reference_block = &sols[reference].blocks[b];
                let nd = block.derivation_columns(split);
                let vectors: Vec<(u64, Vec<u64>)> = sols
                    .iter()
                    .filter(|s| s.blocks[b].pivots == reference_block.pivots)
                    .map(|s| {
                        let p = s.prime.modulus();
                        (p, s.blocks[b].null_vector(k, p))
                    })
                    .collect();
                let mut modulus_bits = 0;
                let coords: Option<Vec<BigRational>> = (0..nd)
                    .map(|c| {
                        let residues: Vec<(u64, u64)> = vectors.iter().map(|(p, v)| (v[c], *p)).collect();
                        let (value, modulus) = crt(&residues).ok()?;
                        modulus_bits = modulus.bits();
                        reconstruct(&value, &modulus)
                    })
                    .collect();
                bound_bits = modulus_bits / 2;
                let Some(coords) = coords else {
                    pending = true;
                    continue;
                };
                outcomes[i].reconstructed = true;
                let triples = coords
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(c, val)| {
                        let (u, m) = sys.derivation_term(block.columns[c] as usize);
                        (u, m, val)
                    });
                let derivation =
                    QDerivation::from_triples(self.arr.vars(), triples).expect("homogeneous by construction");
                if derivation.tangent_to(&self.arr).is_ok() {
                    outcomes[i].verified = true;
                    results[i] = Some(derivation);
                } else {
                    outcomes[i].reconstructed = false;
                    pending = true;
                }
            }
            if !pending {
                break;
            }
            if sols.len() >= self.cfg.prime_budget {
                return (
                    results,
                    LiftReport {
                        degree: sys.degree(),
                        primes: sols.iter().map(|s| s.prime.modulus()).collect(),
                        bound_bits,
                        outcomes,
                        gave_up: true,
                    },
                );
            }
            let p = self.fresh_prime();
            // only the blocks holding candidates matter for lifting
            let mut extra = sols[reference].clone();
            extra.prime = p;
            for (b, block) in sys.blocks().iter().enumerate() {
                if candidates.iter().any(|&(cb, _)| cb == b) {
                    extra.blocks[b] = solve_block(sys, block, &p);
                }
            }
            sols.push(extra);
        }
        (
            results,
            LiftReport {
                degree: sys.degree(),
                primes: sols.iter().map(|s| s.prime.modulus()).collect(),
                bound_bits,
                outcomes,
                gave_up: false,
            },
        )
    }

    /// Runs through `cfg.d_max`.
    pub fn run(&mut self) {
        while self.next_degree() <= self.cfg.d_max {
            self.step();
        }
    }
}

/// Certified graded dimensions through `cfg.d_max`.
pub fn graded_dimensions(arr: &Arrangement, cfg: &SearchConfig) -> Result<DimReport, GradedError> {
    let mut search = GradedSearch::new(arr, cfg)?;
    search.run();
    Ok(search.report)
}

/// Minimal generators through `cfg.d_max`; refuses when a degree is not certified.
pub fn minimal_generators(arr: &Arrangement, cfg: &SearchConfig) -> Result<(DimReport, GeneratorSet), GradedError> {
    let mut search = GradedSearch::new(arr, cfg)?;
    search.run();
    if let Some(bad) = search.report.degrees.iter().find(|g| !g.certified()) {
        return Err(GradedError::Uncertified(bad.degree));
    }
    let gens = search.generator_set();
    Ok((search.report, gens))
}

/// New generators in degree `d` as rational derivations, with the lifting record.
pub fn lift_generators(
    arr: &Arrangement,
    d: u32,
    cfg: &SearchConfig,
) -> Result<(LiftReport, Vec<QDerivation>), GradedError> {
    let cfg = SearchConfig {
        d_max: d,
        ..cfg.clone()
    };
    let mut search = GradedSearch::new(arr, &cfg)?;
    search.run();
    let report = search
        .lifts
        .iter()
        .find(|l| l.degree == d)
        .cloned()
        .unwrap_or(LiftReport {
            degree: d,
            primes: search.report.primes.clone(),
            bound_bits: 0,
            outcomes: Vec::new(),
            gave_up: false,
        });
    if report.gave_up {
        return Err(GradedError::LiftBudget {
            degree: d,
            primes: report.primes.len(),
        });
    }
    let derivations = search
        .generators
        .iter()
        .filter(|(g, _)| g.degree == d && !g.euler)
        .map(|(g, _)| g.derivation.clone())
        .collect();
    Ok((report, derivations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(ids: &[usize], d_max: u32) -> DimReport {
        let arr = Arrangement::from_ids(ids).unwrap();
        graded_dimensions(
            &arr,
            &SearchConfig {
                d_max,
                ..SearchConfig::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn five_minor_degree_one() {
        let arr = Arrangement::from_ids(&[1, 2, 3, 4, 5]).unwrap();
        let cfg = SearchConfig {
            d_max: 2,
            ..SearchConfig::default()
        };
        let (report, gens) = minimal_generators(&arr, &cfg).unwrap();
        assert_eq!(report.certified_ar(), vec![0, 14, 14 * 15]);
        assert_eq!(gens.mu(1), 14);
        assert_eq!(gens.mu(2), 0);
        for g in gens.ar_generators() {
            assert!(g.derivation.tangent_to(&arr).is_ok());
        }
    }

    #[test]
    fn small_arrangements_degree_one() {
        assert_eq!(dims(&[6, 7, 8, 9, 10], 1).certified_ar(), vec![0, 16]);
        assert_eq!(dims(&[1, 2, 3, 5, 10], 1).certified_ar(), vec![0, 13]);
        assert_eq!(dims(&[1, 2, 3, 4, 5, 10], 1).certified_ar(), vec![0, 12]);
    }

    #[test]
    fn cone_over_three_by_four() {
        let r = dims(&[1, 2, 3, 4], 2);
        assert_eq!(r.z0(), Some(3));
        let arr = Arrangement::from_ids(&[1, 2, 3, 4]).unwrap();
        let (_, gens) = minimal_generators(
            &arr,
            &SearchConfig {
                d_max: 2,
                ..SearchConfig::default()
            },
        )
        .unwrap();
        assert_eq!((gens.mu(0), gens.mu(1), gens.mu(2)), (3, 11, 0));
    }

    #[test]
    fn budget_guard() {
        let arr = Arrangement::from_ids(&[1]).unwrap();
        let cfg = SearchConfig {
            d_max: 7,
            ..SearchConfig::default()
        };
        assert!(matches!(
            GradedSearch::new(&arr, &cfg),
            Err(GradedError::DegreeBudget { .. })
        ));
    }

    #[test]
    fn lifted_span_matches_paper_basis() {
        use crate::graded::linalg::Echelon;
        use crate::model::{paper_basis, PaperBasisId};
        let arr = Arrangement::from_ids(&[1, 2, 3, 4, 5]).unwrap();
        let (report, lifted) = lift_generators(&arr, 1, &SearchConfig::default()).unwrap();
        assert!(report.success());
        assert_eq!(lifted.len(), 14);
        let p = PrimeField::new(4_611_686_018_427_388_039).unwrap();
        let monos = monomials_of_degree(15, 1);
        let flat = |d: &QDerivation| -> Vec<u64> {
            let mut v = vec![0u64; 15 * 15];
            for (u, m, c) in d.triples() {
                v[u * 15 + monos.iter().position(|x| *x == m).unwrap()] = p.reduce_rational(&c).unwrap();
            }
            v
        };
        let mut ech = Echelon::new(&p);
        let euler = QDerivation::euler(arr.vars());
        ech.insert(flat(&euler));
        for d in &lifted {
            assert!(ech.insert(flat(d)));
        }
        for d in paper_basis(PaperBasisId::ThmA(5)).unwrap() {
            assert!(!ech.insert(flat(&d)), "transcribed derivation outside the lifted span");
        }
    }
}
