//! Determinants of polynomial matrices and of matrices over `F_p`.

use std::collections::HashMap;

use crate::algebra::field::{inv_mod, mul_mod, sub_mod};
use crate::algebra::{Field, Polynomial};

/// Determinant of a square matrix over `F_p` by elimination.
pub fn det_mod(mut a: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| a[r][c] != 0) else {
            return 0;
        };
        if r != c {
            a.swap(r, c);
            det = sub_mod(0, det, p);
        }
        let pivot = a[c][c];
        det = mul_mod(det, pivot, p);
        let inv = inv_mod(pivot, p).expect("nonzero pivot");
        let pivot_row = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            if row[c] == 0 {
                continue;
            }
            let f = mul_mod(row[c], inv, p);
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = sub_mod(*x, mul_mod(f, y, p), p);
            }
        }
    }
    det
}

/// Exact determinant by dynamic programming over row subsets.
///
/// Columns are processed in ascending order of their nonzero count, so that
/// the sparse columns are expanded first and the number of live subsets
/// stays small. Returns `Err(terms)` once the live polynomials hold more
/// than `budget` terms in total.
pub fn det_subset_dp<F: Field>(entries: &[Vec<Polynomial<F>>], budget: usize) -> Result<Polynomial<F>, usize> {
    let n = entries.len();
    assert!(
        n <= 31 && entries.iter().all(|r| r.len() == n),
        "square matrix of size at most 31"
    );
    let zero_like = || entries[0][0].scale(&entries[0][0].field().zero());
    if n == 0 {
        return Err(0);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&c| (entries.iter().filter(|r| !r[c].is_zero()).count(), c));
    let field = entries[0][0].field().clone();

    let mut layer: HashMap<u32, Polynomial<F>> = HashMap::new();
    layer.insert(
        0,
        Polynomial::constant(field.clone(), entries[0][0].vars().clone(), field.one()),
    );
    for &col in &order {
        let mut next: HashMap<u32, Polynomial<F>> = HashMap::new();
        // deterministic iteration order keeps summation order reproducible
        let mut states: Vec<(&u32, &Polynomial<F>)> = layer.iter().collect();
        states.sort_by_key(|(s, _)| **s);
        for (&used, acc) in states {
            for (r, row) in entries.iter().enumerate() {
                if used & (1 << r) != 0 || row[col].is_zero() {
                    continue;
                }
                let above = (used >> (r + 1)).count_ones();
                let mut term = acc * &row[col];
                if above % 2 == 1 {
                    term = term.neg();
                }
                let key = used | (1 << r);
                match next.remove(&key) {
                    Some(prev) => {
                        let sum = &prev + &term;
                        if !sum.is_zero() {
                            next.insert(key, sum);
                        }
                    }
                    None => {
                        next.insert(key, term);
                    }
                }
            }
        }
        let size: usize = next.values().map(Polynomial::len).sum();
        if size > budget {
            return Err(size);
        }
        if next.is_empty() {
            return Ok(zero_like());
        }
        layer = next;
    }
    let det = layer.remove(&((1u32 << n) - 1)).unwrap_or_else(zero_like);
    Ok(if permutation_sign(&order) < 0 { det.neg() } else { det })
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}
