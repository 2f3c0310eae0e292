//! Linearization of `θ(f_i) = g_i f_i` on monomial bases.
//!
//! Unknowns are ordered with the derivation coefficients first, variable
//! major: unknown `u * M_d + k` is the coefficient of the `k`-th monomial of
//! degree `d` (descending grevlex) in `a_u`. Cofactor unknowns follow, factor
//! major on the degree `d - 1` monomials. Equation `i * M_{d+m-1} + k` is the
//! coefficient of the `k`-th monomial of degree `d + m - 1` in
//! `θ(f_i) - g_i f_i`.
//!
//! Every minor is multihomogeneous for the row and column gradings of the
//! generic matrix, so the system splits into blocks indexed by multidegree.
//! Blocks are solved independently.

use std::collections::HashMap;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::algebra::{monomial_count, monomials_of_degree, Monomial};
use crate::model::{Arrangement, MatrixShape};

/// Row and column multidegree, padded to the largest supported shape.
pub type Weight = [i8; 8];

pub(crate) fn monomial_weight(shape: MatrixShape, m: &Monomial) -> Weight {
    let mut w = [0i8; 8];
    let n = shape.cols();
    for v in m.support() {
        let e = m.exponent(v) as i8;
        w[v / n] += e;
        w[shape.rows() + v % n] += e;
    }
    w
}

/// Weight of the derivation term `m ∂_u`.
pub(crate) fn term_weight(shape: MatrixShape, m: &Monomial, u: usize) -> Weight {
    let mut w = monomial_weight(shape, m);
    let n = shape.cols();
    w[u / n] -= 1;
    w[shape.rows() + u % n] -= 1;
    w
}

pub(crate) fn index_map(monos: &[Monomial]) -> HashMap<Monomial, u32> {
    monos.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect()
}

/// A set of unknowns closed under the equations that mention them.
#[derive(Clone, Debug)]
pub struct Block {
    pub weight: Weight,
    /// Global unknown indices, ascending.
    pub columns: Vec<u32>,
    /// Indices into [`TangencySystem::rows`].
    pub rows: Vec<u32>,
}

impl Block {
    /// Number of leading columns that are derivation unknowns.
    pub fn derivation_columns(&self, split: usize) -> usize {
        self.columns.partition_point(|&c| (c as usize) < split)
    }
}

/// Sparse integer system whose kernel is `D(C)_d` together with the cofactors.
#[derive(Clone, Debug)]
pub struct TangencySystem {
    shape: MatrixShape,
    degree: u32,
    factor_count: usize,
    monomials: Vec<Monomial>,
    cofactor_monomials: usize,
    nominal_equations: usize,
    /// Nonempty equations as `(equation index, entries)`.
    rows: Vec<(u32, Vec<(u32, i64)>)>,
    blocks: Vec<Block>,
}

impl TangencySystem {
    pub fn build(arr: &Arrangement, d: u32) -> Self {
        let shape = arr.shape();
        let nvars = shape.nvars();
        let m = shape.rows() as u32;
        let d_us = d as usize;
        let monomials = monomials_of_degree(nvars, d_us);
        let md = monomials.len();
        let cofactor_basis = if d == 0 {
            Vec::new()
        } else {
            monomials_of_degree(nvars, d_us - 1)
        };
        let eq_monos = monomials_of_degree(nvars, (d + m - 1) as usize);
        let eq_index = index_map(&eq_monos);
        let me = eq_monos.len();
        let split = nvars * md;
        let factors = arr.integer_factors();

        let per_factor: Vec<Vec<(u32, u32, i64)>> = factors
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let mut trip = Vec::new();
                let row0 = (i * me) as u32;
                for u in 0..nvars {
                    let df: Vec<(Monomial, i64)> = f
                        .iter()
                        .filter_map(|(t, c)| t.lower(u).map(|(e, q)| (q, c * e as i64)))
                        .collect();
                    if df.is_empty() {
                        continue;
                    }
                    for (k, mono) in monomials.iter().enumerate() {
                        let col = (u * md + k) as u32;
                        for (t, c) in &df {
                            let row = row0 + eq_index[&mono.mul(t)];
                            trip.push((row, col, *c));
                        }
                    }
                }
                let g0 = split + i * cofactor_basis.len();
                for (k, nu) in cofactor_basis.iter().enumerate() {
                    let col = (g0 + k) as u32;
                    for (t, c) in f {
                        trip.push((row0 + eq_index[&nu.mul(t)], col, -c));
                    }
                }
                trip.sort_unstable();
                trip
            })
            .collect();

        let mut rows: Vec<(u32, Vec<(u32, i64)>)> = Vec::new();
        for trip in per_factor {
            for (row, col, c) in trip {
                match rows.last_mut() {
                    Some((r, entries)) if *r == row => {
                        debug_assert!(entries.last().map_or(true, |e| e.0 < col), "duplicate entry");
                        entries.push((col, c));
                    }
                    _ => rows.push((row, vec![(col, c)])),
                }
            }
        }

        let mut sys = TangencySystem {
            shape,
            degree: d,
            factor_count: factors.len(),
            monomials,
            cofactor_monomials: cofactor_basis.len(),
            nominal_equations: factors.len() * me,
            rows,
            blocks: Vec::new(),
        };
        sys.assert_sparsity(arr);
        sys.blocks = sys.partition(&cofactor_basis);
        sys
    }

    fn assert_sparsity(&self, arr: &Arrangement) {
        // each derivation unknown meets at most (terms of ∂_u f_i) <= (m-1)! entries per factor
        let per_factor = (1..self.shape.rows()).product::<usize>();
        let bound = self.derivation_unknowns() * per_factor * self.factor_count
            + self.cofactor_unknowns() * arr.factors().first().map_or(0, |f| f.len());
        assert!(
            self.nonzeros() <= bound,
            "tangency system denser than the structural bound"
        );
    }

    fn partition(&self, cofactor_basis: &[Monomial]) -> Vec<Block> {
        let nvars = self.shape.nvars();
        let md = self.monomials.len();
        let mut ids: HashMap<Weight, usize> = HashMap::new();
        let mut blocks: Vec<Block> = Vec::new();
        let mut column_block = vec![0u32; self.unknowns()];
        let mut place = |w: Weight, col: usize, blocks: &mut Vec<Block>| {
            let id = *ids.entry(w).or_insert_with(|| {
                blocks.push(Block {
                    weight: w,
                    columns: Vec::new(),
                    rows: Vec::new(),
                });
                blocks.len() - 1
            });
            blocks[id].columns.push(col as u32);
            column_block[col] = id as u32;
        };
        for u in 0..nvars {
            for (k, mono) in self.monomials.iter().enumerate() {
                place(term_weight(self.shape, mono, u), u * md + k, &mut blocks);
            }
        }
        let split = nvars * md;
        for i in 0..self.factor_count {
            for (k, nu) in cofactor_basis.iter().enumerate() {
                place(
                    monomial_weight(self.shape, nu),
                    split + i * cofactor_basis.len() + k,
                    &mut blocks,
                );
            }
        }
        for (r, (_, entries)) in self.rows.iter().enumerate() {
            let b = column_block[entries[0].0 as usize];
            debug_assert!(entries.iter().all(|(c, _)| column_block[*c as usize] == b));
            blocks[b as usize].rows.push(r as u32);
        }
        // columns were pushed in ascending order within each pass, so only the
        // two passes need merging
        for b in &mut blocks {
            b.columns.sort_unstable();
        }
        blocks
    }

    pub fn shape(&self) -> MatrixShape {
        self.shape
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Degree-`d` monomial basis indexing the derivation unknowns.
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn derivation_unknowns(&self) -> usize {
        self.shape.nvars() * self.monomials.len()
    }

    pub fn cofactor_unknowns(&self) -> usize {
        self.factor_count * self.cofactor_monomials
    }

    pub fn unknowns(&self) -> usize {
        self.derivation_unknowns() + self.cofactor_unknowns()
    }

    /// `(#factors) * C(d + m - 1 + N - 1, N - 1)`, counting identically zero equations.
    pub fn equations(&self) -> usize {
        self.nominal_equations
    }

    pub fn nonempty_equations(&self) -> usize {
        self.rows.len()
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(|(_, e)| e.len()).sum()
    }

    pub fn rows(&self) -> &[(u32, Vec<(u32, i64)>)] {
        &self.rows
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `(variable, monomial)` of a derivation unknown.
    pub fn derivation_term(&self, col: usize) -> (usize, Monomial) {
        let md = self.monomials.len();
        (col / md, self.monomials[col % md])
    }

    /// Writes `rows cols nonzeros` then one `row col value` line per entry
    /// (0-based indices, equation numbering as in the module docs).
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {} {}", self.equations(), self.unknowns(), self.nonzeros())?;
        for (r, entries) in &self.rows {
            for (c, v) in entries {
                writeln!(out, "{r} {c} {v}")?;
            }
        }
        Ok(())
    }
}

/// Number of monomials of degree `d - 1`, the Euler contribution `S_{d-1} E`.
pub fn euler_dimension(nvars: usize, d: u32) -> usize {
    if d == 0 {
        0
    } else {
        monomial_count(nvars, d as usize - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_degree_one() {
        let arr = Arrangement::from_ids(&[1, 2, 3, 4, 5]).unwrap();
        let sys = TangencySystem::build(&arr, 1);
        assert_eq!(sys.unknowns(), 230);
        assert_eq!(sys.equations(), 3400);
    }

    #[test]
    fn counts_degree_zero() {
        let arr = Arrangement::from_ids(&[1, 7]).unwrap();
        let sys = TangencySystem::build(&arr, 0);
        assert_eq!(sys.unknowns(), 15);
        assert_eq!(sys.cofactor_unknowns(), 0);
        assert_eq!(sys.equations(), 2 * 120);
    }

    #[test]
    fn blocks_partition_unknowns() {
        let arr = Arrangement::from_ids(&[1, 2, 6]).unwrap();
        let sys = TangencySystem::build(&arr, 2);
        let mut cols: Vec<u32> = sys.blocks().iter().flat_map(|b| b.columns.clone()).collect();
        cols.sort_unstable();
        assert_eq!(cols, (0..sys.unknowns() as u32).collect::<Vec<_>>());
        let rows: usize = sys.blocks().iter().map(|b| b.rows.len()).sum();
        assert_eq!(rows, sys.nonempty_equations());
    }

    #[test]
    fn triplet_dump_header() {
        let arr = Arrangement::from_ids(&[1]).unwrap();
        let sys = TangencySystem::build(&arr, 0);
        let mut buf = Vec::new();
        sys.write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("120 15 {}", sys.nonzeros()));
        assert_eq!(lines.len(), 1 + sys.nonzeros());
    }
}
