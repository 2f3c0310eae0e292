//! Hilbert-function predictions of free and nearly-free resolution shapes,
//! and the exponent bookkeeping used for graded obstructions.

use serde::{Deserialize, Serialize};

use crate::algebra::monomial_count;

/// `dim S_t` for `t >= 0`, zero for negative `t`.
fn s_dim(nvars: usize, t: i64) -> i64 {
    if t < 0 {
        0
    } else {
        monomial_count(nvars, t as usize) as i64
    }
}

/// A conjectured shape for the graded module `AR(F)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeHypothesis {
    /// Free with the given exponents.
    Free(Vec<u32>),
    /// Nearly free: generators in degrees `d_0 <= ... <= d_n` and one
    /// relation in degree `d_n + 1`.
    NearlyFree(Vec<u32>),
}

impl ShapeHypothesis {
    /// Predicted `dim AR_t`.
    pub fn predicted(&self, nvars: usize, t: u32) -> i64 {
        let t = t as i64;
        match self {
            ShapeHypothesis::Free(exps) => exps.iter().map(|&e| s_dim(nvars, t - e as i64)).sum(),
            ShapeHypothesis::NearlyFree(degs) => {
                let top = degs.iter().copied().max().unwrap_or(0) as i64;
                degs.iter().map(|&e| s_dim(nvars, t - e as i64)).sum::<i64>() - s_dim(nvars, t - top - 1)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Consistency {
    Consistent,
    /// First degree whose certified dimension contradicts the prediction.
    Inconsistent {
        degree: u32,
    },
}

/// Compares certified `dim AR_0, dim AR_1, ...` against a hypothesis.
pub fn shape_consistency(ar: &[usize], nvars: usize, hyp: &ShapeHypothesis) -> Consistency {
    for (t, &dim) in ar.iter().enumerate() {
        if hyp.predicted(nvars, t as u32) != dim as i64 {
            return Consistency::Inconsistent { degree: t as u32 };
        }
    }
    Consistency::Consistent
}

/// Generator counts forced by the data: `counts[e]` generators of degree `e`
/// for `e <= d_max`, obtained by peeling off the contribution of lower degrees.
/// Returns the first degree where the count would be negative, if any.
pub fn pinned_counts(ar: &[usize], nvars: usize) -> Result<Vec<i64>, u32> {
    let mut counts: Vec<i64> = Vec::with_capacity(ar.len());
    for (t, &dim) in ar.iter().enumerate() {
        let from_lower: i64 = counts
            .iter()
            .enumerate()
            .map(|(e, &n)| n * s_dim(nvars, t as i64 - e as i64))
            .sum();
        let n = dim as i64 - from_lower;
        if n < 0 {
            return Err(t as u32);
        }
        counts.push(n);
    }
    Ok(counts)
}

/// Outcome of matching certified data against every free shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeFit {
    /// No exponent multiset fits; `degree` is the last degree of data used.
    Impossible { degree: u32, reason: String },
    /// Exponents up to `d_max` are pinned; `remaining` more exponents, each
    /// above `d_max`, must sum to `remaining_sum`.
    Possible {
        pinned: Vec<u32>,
        remaining: usize,
        remaining_sum: usize,
    },
}

/// Exponent multisets of `rank` parts summing to `total` whose graded
/// dimensions agree with `ar` through `ar.len() - 1`.
pub fn free_fit(ar: &[usize], nvars: usize, rank: usize, total: usize) -> FreeFit {
    let d_max = ar.len().saturating_sub(1) as u32;
    let counts = match pinned_counts(ar, nvars) {
        Ok(c) => c,
        Err(t) => {
            return FreeFit::Impossible {
                degree: t,
                reason: format!("dim AR_{t} is smaller than the contribution of lower-degree generators"),
            }
        }
    };
    let mut pinned = Vec::new();
    for (e, &n) in counts.iter().enumerate() {
        pinned.extend(std::iter::repeat(e as u32).take(n as usize));
    }
    if pinned.len() > rank {
        return FreeFit::Impossible {
            degree: d_max,
            reason: format!(
                "{} generators through degree {d_max}, but a free module has {rank}",
                pinned.len()
            ),
        };
    }
    let used: usize = pinned.iter().map(|&e| e as usize).sum();
    if used > total {
        return FreeFit::Impossible {
            degree: d_max,
            reason: format!("exponents through degree {d_max} already sum to {used} > {total}"),
        };
    }
    let remaining = rank - pinned.len();
    let remaining_sum = total - used;
    let feasible = if remaining == 0 {
        remaining_sum == 0
    } else {
        remaining_sum >= remaining * (d_max as usize + 1)
    };
    if !feasible {
        return FreeFit::Impossible {
            degree: d_max,
            reason: format!("{remaining} exponents above {d_max} cannot sum to {remaining_sum}"),
        };
    }
    FreeFit::Possible {
        pinned,
        remaining,
        remaining_sum,
    }
}

/// Whether some nearly-free shape with `nvars` generators matches the data;
/// on failure returns the largest witness degree over all candidate tops.
pub fn nearly_free_fit(ar: &[usize], nvars: usize) -> Consistency {
    let d_max = ar.len().saturating_sub(1) as u32;
    let mut witness = 0;
    // top degree above d_max: the relation is not yet visible
    match pinned_counts(ar, nvars) {
        Ok(c) if c.iter().sum::<i64>() < nvars as i64 => return Consistency::Consistent,
        Ok(_) => witness = witness.max(d_max),
        Err(t) => witness = witness.max(t),
    }
    for top in 0..=d_max {
        let mut counts: Vec<i64> = Vec::new();
        let mut fail = None;
        for (t, &dim) in ar.iter().enumerate() {
            let t = t as i64;
            let from_lower: i64 = counts
                .iter()
                .enumerate()
                .map(|(e, &n)| n * s_dim(nvars, t - e as i64))
                .sum::<i64>()
                - s_dim(nvars, t - top as i64 - 1);
            let n = dim as i64 - from_lower;
            let allowed = if t as u32 > top { n == 0 } else { n >= 0 };
            if !allowed || (t as u32 == top && n < 1) {
                fail = Some(t as u32);
                break;
            }
            counts.push(n);
        }
        match fail {
            Some(t) => witness = witness.max(t),
            None if counts.iter().sum::<i64>() == nvars as i64 => return Consistency::Consistent,
            None => witness = witness.max(d_max),
        }
    }
    Consistency::Inconsistent { degree: witness }
}

/// All multisets (ascending) of `parts` integers in `0..=max_part` with
/// exactly `zeros` zeros and sum `total`. Used as a brute-force oracle.
pub fn enumerate_exponents(parts: usize, zeros: usize, total: usize, max_part: u32) -> Vec<Vec<u32>> {
    fn rec(left: usize, min: u32, max: u32, sum: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            if sum == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in min..=max {
            if (e as usize) * left > sum {
                break;
            }
            cur.push(e);
            rec(left - 1, e, max, sum - e as usize, cur, out);
            cur.pop();
        }
    }
    if zeros > parts {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0; zeros];
    rec(parts - zeros, 1, max_part, total, &mut cur, &mut out);
    out
}
