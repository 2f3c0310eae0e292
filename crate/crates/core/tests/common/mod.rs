//! Property checks shared by the proptest suites and the acceptance binary.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use detfree::algebra::{
    binomial, monomial_count, monomials_of_degree, Field, Monomial, PrimeField, QPoly, Rationals, VariableOrder,
};
use detfree::graded::{graded_dimensions, minimal_generators, SearchConfig};
use detfree::model::{
    column_permutations, paper_basis, Arrangement, Derivation, MatrixShape, MinorLabel, PaperBasisId, QDerivation,
};
use detfree::saito::{det_mod, saito_matrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// `2^61 - 1`.
pub const P: u64 = 2_305_843_009_213_693_951;
pub const NVARS: usize = 15;

pub fn field() -> PrimeField {
    PrimeField::new(P).unwrap()
}

pub fn vars() -> Arc<VariableOrder> {
    MatrixShape::DEFAULT.variables()
}

fn monomial(exps: &[u8]) -> Monomial {
    Monomial::from_exponents(exps)
}

pub fn poly_mod_p() -> impl Strategy<Value = detfree::algebra::Polynomial<PrimeField>> {
    prop::collection::vec((prop::collection::vec(0u8..=2, NVARS), 0..P), 0..=6).prop_map(|terms| {
        detfree::algebra::Polynomial::from_terms(field(), vars(), terms.into_iter().map(|(e, c)| (monomial(&e), c)))
    })
}

pub fn poly_q() -> impl Strategy<Value = QPoly> {
    prop::collection::vec((prop::collection::vec(0u8..=2, NVARS), -20i64..=20), 0..=6)
        .prop_map(|terms| QPoly::from_integer_terms(vars(), terms.into_iter().map(|(e, c)| (monomial(&e), c))))
}

pub fn nonzero_poly_q() -> impl Strategy<Value = QPoly> {
    poly_q().prop_filter("nonzero divisor", |f| !f.is_zero())
}

/// Homogeneous derivation mod p of degree 0, 1 or 2.
pub fn derivation_mod_p() -> impl Strategy<Value = Derivation<PrimeField>> {
    (0u32..=2)
        .prop_flat_map(|e| {
            let count = monomial_count(NVARS, e as usize);
            prop::collection::vec(prop::collection::vec((0..count, 0..P), 0..=3), NVARS)
                .prop_map(move |coefs| (e, coefs))
        })
        .prop_map(|(e, coefs)| {
            let mons = monomials_of_degree(NVARS, e as usize);
            let coefficients = coefs
                .into_iter()
                .map(|terms| {
                    detfree::algebra::Polynomial::from_terms(
                        field(),
                        vars(),
                        terms.into_iter().map(|(i, c)| (mons[i], c)),
                    )
                })
                .collect();
            Derivation::new(coefficients).unwrap()
        })
}

pub fn check_leibniz(
    theta: &Derivation<PrimeField>,
    f: &detfree::algebra::Polynomial<PrimeField>,
    g: &detfree::algebra::Polynomial<PrimeField>,
) -> Result<(), String> {
    let lhs = theta.apply(&(f * g));
    let rhs = &(&theta.apply(f) * g) + &(f * &theta.apply(g));
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("θ(fg) = {lhs} but θ(f)g + fθ(g) = {rhs}"))
    }
}

pub fn check_exact_division(q: &QPoly, f: &QPoly) -> Result<(), String> {
    let product = q * f;
    match product.exact_divide(f) {
        Ok(Some(back)) if &back == q => {}
        other => return Err(format!("({q})·({f}) ÷ ({f}) gave {other:?}")),
    }
    let p = field();
    let (qp, fp) = (q.reduce_mod(&p).unwrap(), f.reduce_mod(&p).unwrap());
    match (&qp * &fp).exact_divide(&fp) {
        Ok(Some(back)) if back == qp => Ok(()),
        other => Err(format!("mod p division of ({q})·({f}) gave {other:?}")),
    }
}

pub fn check_evaluation(
    f: &detfree::algebra::Polynomial<PrimeField>,
    g: &detfree::algebra::Polynomial<PrimeField>,
    h: &QPoly,
    point: &[i64],
) -> Result<(), String> {
    let p = field();
    let xp: Vec<u64> = point.iter().map(|&v| p.reduce_i64(v)).collect();
    let (fx, gx) = (f.evaluate(&xp).unwrap(), g.evaluate(&xp).unwrap());
    if (f * g).evaluate(&xp).unwrap() != p.mul(&fx, &gx) {
        return Err("evaluation does not respect products".into());
    }
    if (f + g).evaluate(&xp).unwrap() != p.add(&fx, &gx) {
        return Err("evaluation does not respect sums".into());
    }
    let xq: Vec<BigRational> = point
        .iter()
        .map(|&v| BigRational::from_integer(BigInt::from(v)))
        .collect();
    let over_q = p.reduce_rational(&h.evaluate(&xq).unwrap()).unwrap();
    if h.reduce_mod(&p).unwrap().evaluate(&xp).unwrap() != over_q {
        return Err(format!("reduction mod p does not commute with evaluating {h}"));
    }
    Ok(())
}

pub fn check_monomial_count(n: usize, d: usize) -> Result<(), String> {
    let mons = monomials_of_degree(n, d);
    let expected = binomial(n + d - 1, d);
    if mons.len() != expected || monomial_count(n, d) != expected {
        return Err(format!(
            "n={n} d={d}: listed {} counted {} expected {expected}",
            mons.len(),
            monomial_count(n, d)
        ));
    }
    let distinct: std::collections::HashSet<_> = mons.iter().collect();
    if distinct.len() != mons.len() || mons.iter().any(|m| m.degree() as usize != d) {
        return Err(format!("n={n} d={d}: repeated or misdegree monomials"));
    }
    Ok(())
}

fn thm_a_bases() -> &'static Vec<(Arrangement, Vec<QDerivation>)> {
    static CELL: OnceLock<Vec<(Arrangement, Vec<QDerivation>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        (5..=10)
            .map(|j| {
                let id = PaperBasisId::ThmA(j);
                (id.arrangement().unwrap(), paper_basis(id).unwrap())
            })
            .collect()
    })
}

/// `θ = Σ r_k θ_k + λ x_v ∂_u` over a transcribed degree-one basis.
///
/// The basis part is tangent, and `x_v ∂_u f_i` has at most two terms so it
/// lies in `(f_i)` only when it vanishes. Hence `θ` is tangent to `f_i`
/// exactly when `λ = 0` or `f_i` does not involve variable `u`.
pub fn check_tangency_characterization(
    j: usize,
    weights: &[i64],
    lambda: i64,
    u: usize,
    v: usize,
) -> Result<(), String> {
    let (arr, basis) = &thm_a_bases()[j - 5];
    let vars = arr.vars().clone();
    let q = |c: i64| BigRational::from_integer(BigInt::from(c));
    let mut coefficients = vec![QPoly::zero(Rationals, vars.clone()); NVARS];
    for (theta, &r) in basis.iter().zip(weights) {
        for (slot, a) in coefficients.iter_mut().zip(theta.coefficients()) {
            *slot = &*slot + &a.scale(&q(r));
        }
    }
    let x_v = QPoly::variable(Rationals, vars.clone(), v);
    coefficients[u] = &coefficients[u] + &x_v.scale(&q(lambda));
    let theta = Derivation::new(coefficients).map_err(|e| e.to_string())?;

    let expect: Vec<bool> = arr
        .factors()
        .iter()
        .map(|f| lambda == 0 || f.partial_derivative(u).is_zero())
        .collect();
    for (i, f) in arr.factors().iter().enumerate() {
        let got = theta.tangency(arr, std::slice::from_ref(f)).is_ok();
        if got != expect[i] {
            return Err(format!(
                "factor {} of {arr}: tangent={got}, expected {}",
                i + 1,
                expect[i]
            ));
        }
    }
    match (theta.tangent_to(arr), expect.iter().position(|ok| !ok)) {
        (Ok(_), None) => Ok(()),
        (Err(fail), Some(first)) if fail.factor_index == first => Ok(()),
        (got, want) => Err(format!(
            "whole-arrangement test disagrees: {:?} vs first failing factor {want:?}",
            got.map(|_| ())
        )),
    }
}

struct PermutedCase {
    arr: Arrangement,
    basis: Vec<QDerivation>,
}

fn permuted_cases() -> &'static Vec<(BigRational, Vec<PermutedCase>)> {
    static CELL: OnceLock<Vec<(BigRational, Vec<PermutedCase>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let shape = MatrixShape::DEFAULT;
        [(PaperBasisId::ThmA(5), 9375), (PaperBasisId::Mid(7), 23328)]
            .into_iter()
            .map(|(id, c)| {
                let arr = id.arrangement().unwrap();
                let basis = paper_basis(id).unwrap();
                let cases = column_permutations(shape.cols())
                    .into_iter()
                    .map(|(sigma, _)| {
                        let var_perm: Vec<usize> = (0..shape.nvars())
                            .map(|x| shape.var_index(x / shape.cols(), sigma[x % shape.cols()]))
                            .collect();
                        let mut ids: Vec<usize> = arr
                            .labels()
                            .iter()
                            .map(|l| {
                                let cols: Vec<usize> = l.columns().iter().map(|&col| sigma[col - 1] + 1).collect();
                                MinorLabel::from_columns(shape, &cols).unwrap().id()
                            })
                            .collect();
                        ids.sort_unstable();
                        PermutedCase {
                            arr: Arrangement::new(shape, &ids).unwrap(),
                            basis: basis.iter().map(|d| d.permute_variables(&var_perm)).collect(),
                        }
                    })
                    .collect();
                (BigRational::from_integer(BigInt::from(c)), cases)
            })
            .collect()
    })
}

/// At a random point, `det Φ_σ(ξ) = ±|c| F_σ(ξ)` for the column-permuted basis.
pub fn check_constant_invariance(which: usize, perm: usize, point: &[u64]) -> Result<(), String> {
    let (c, cases) = &permuted_cases()[which];
    let case = &cases[perm % cases.len()];
    let p = field();
    let mat = saito_matrix(&case.arr, &case.basis).map_err(|e| e.to_string())?;
    let det = det_mod(mat.evaluate_mod(&p, point).ok_or("denominator divisible by p")?, P);
    let fx = case.arr.evaluate_mod(&p, point);
    let cf = p.mul(&p.reduce_rational(c).unwrap(), &fx);
    if det == cf || det == p.neg(&cf) {
        Ok(())
    } else {
        Err(format!("{}: det Φ at {point:?} is not ±{c}·F", case.arr))
    }
}

/// `dim AR_d` from an independent sparse elimination of the system
/// `θ(f_i) = g_i f_i` with both `θ` and the cofactors `g_i` unknown.
pub fn oracle_ar(arr: &Arrangement, d: usize, p: &PrimeField) -> usize {
    let n = arr.nvars();
    let factors: Vec<_> = arr.factors().iter().map(|f| f.reduce_mod(p).unwrap()).collect();
    let mut columns: Vec<BTreeMap<(usize, Monomial), u64>> = Vec::new();
    for m in monomials_of_degree(n, d) {
        for u in 0..n {
            let mut col = BTreeMap::new();
            for (i, f) in factors.iter().enumerate() {
                for (t, c) in f.partial_derivative(u).terms() {
                    col.insert((i, m.mul(t)), *c);
                }
            }
            columns.push(col);
        }
    }
    if d >= 1 {
        for m in monomials_of_degree(n, d - 1) {
            for (i, f) in factors.iter().enumerate() {
                columns.push(f.terms().iter().map(|(t, c)| ((i, m.mul(t)), p.neg(c))).collect());
            }
        }
    }
    let total = columns.len();
    let mut pivots: HashMap<(usize, Monomial), BTreeMap<(usize, Monomial), u64>> = HashMap::new();
    for mut col in columns {
        while let Some((&lead, &c)) = col.iter().next_back() {
            match pivots.get(&lead) {
                Some(piv) => {
                    for (k, v) in piv {
                        let e = col.entry(*k).or_insert(0);
                        *e = p.sub(e, &p.mul(&c, v));
                        if *e == 0 {
                            col.remove(k);
                        }
                    }
                }
                None => {
                    let inv = p.inv(&c).unwrap();
                    let normalized = col.into_iter().map(|(k, v)| (k, p.mul(&v, &inv))).collect();
                    pivots.insert(lead, normalized);
                    break;
                }
            }
        }
    }
    let dim_d = total - pivots.len();
    dim_d - if d >= 1 { monomial_count(n, d - 1) } else { 0 }
}

pub fn ids_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::sample::subsequence((1..=10).collect::<Vec<usize>>(), 1..=10)
}

fn search_config(seed: u64, d_max: u32) -> SearchConfig {
    SearchConfig {
        d_max,
        seed,
        ..SearchConfig::default()
    }
}

/// Every reported degree is certified (lower = upper), agrees with the
/// oracle through `oracle_depth`, and `z0` covers the unused columns.
pub fn check_sandwich(ids: &[usize], seed: u64, d_max: u32, oracle_depth: u32) -> Result<(), String> {
    let arr = Arrangement::from_ids(ids).map_err(|e| e.to_string())?;
    let report = graded_dimensions(&arr, &search_config(seed, d_max)).map_err(|e| e.to_string())?;
    let p = field();
    for dims in &report.degrees {
        if !dims.certified() {
            return Err(format!(
                "{arr} degree {}: {} ≤ dim ≤ {}",
                dims.degree, dims.dim_d_lower, dims.dim_d_upper
            ));
        }
        if dims.degree <= oracle_depth {
            let want = oracle_ar(&arr, dims.degree as usize, &p);
            if report.ar(dims.degree) != Some(want) {
                return Err(format!(
                    "{arr} degree {}: AR {:?}, oracle {want}",
                    dims.degree,
                    report.ar(dims.degree)
                ));
            }
        }
    }
    let unused = MatrixShape::DEFAULT.cols() - arr.column_support().len();
    match report.z0() {
        Some(z0) if z0 >= 3 * unused => Ok(()),
        z0 => Err(format!("{arr}: z0 {z0:?} below 3·{unused}")),
    }
}

type Fingerprint = (
    detfree::graded::DimReport,
    Vec<(u32, bool, Vec<(usize, Monomial, BigRational)>)>,
);

fn fingerprint(arr: &Arrangement, cfg: &SearchConfig) -> Fingerprint {
    let (report, gens) = minimal_generators(arr, cfg).unwrap();
    let gens = gens
        .generators
        .iter()
        .map(|g| (g.degree, g.euler, g.derivation.triples()))
        .collect();
    (report, gens)
}

/// Dimensions and lifted generators agree between a one-thread and a
/// three-thread pool.
pub fn check_thread_determinism(ids: &[usize], seed: u64) -> Result<(), String> {
    let arr = Arrangement::from_ids(ids).map_err(|e| e.to_string())?;
    let cfg = search_config(seed, 2);
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let one = pool(1).install(|| fingerprint(&arr, &cfg));
    let three = pool(3).install(|| fingerprint(&arr, &cfg));
    if one == three {
        Ok(())
    } else {
        Err(format!("{arr} seed {seed}: results depend on the thread count"))
    }
}
