//! Dense elimination modulo a prime on the blocks of a tangency system.

use rayon::prelude::*;

use super::system::{Block, TangencySystem};
use crate::algebra::field::{inv_mod, mul_mod, sub_mod};
use crate::algebra::PrimeField;

/// Reduced row echelon form of one block. Pivots are chosen left to right
/// in the global unknown order, so the form is unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSolution {
    pub rank: usize,
    /// Local column of each pivot row.
    pub pivots: Vec<usize>,
    /// Local non-pivot columns, ascending.
    pub free: Vec<usize>,
    rref: Vec<Vec<u64>>,
}

impl BlockSolution {
    pub fn nullity(&self) -> usize {
        self.free.len()
    }

    /// Canonical kernel vector for the `k`-th free column: one there, zero on
    /// the other free columns.
    pub fn null_vector(&self, k: usize, p: u64) -> Vec<u64> {
        let ncols = self.pivots.len() + self.free.len();
        let f = self.free[k];
        let mut v = vec![0u64; ncols];
        v[f] = 1;
        for (row, &pc) in self.rref.iter().zip(&self.pivots) {
            v[pc] = sub_mod(0, row[f], p);
        }
        v
    }
}

/// Gauss-Jordan elimination in place; returns pivot columns.
pub(crate) fn rref_in_place(rows: &mut Vec<Vec<u64>>, ncols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = inv_mod(rows[r][c], p).expect("nonzero pivot");
        for x in rows[r][c..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = std::mem::take(&mut rows[r]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let factor = row[c];
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if y != 0 {
                    *x = sub_mod(*x, mul_mod(factor, y, p), p);
                }
            }
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn solve_block(sys: &TangencySystem, block: &Block, field: &PrimeField) -> BlockSolution {
    let p = field.modulus();
    let ncols = block.columns.len();
    let local = |c: u32| block.columns.binary_search(&c).expect("column in block");
    let mut rows: Vec<Vec<u64>> = block
        .rows
        .iter()
        .map(|&r| {
            let mut dense = vec![0u64; ncols];
            for &(c, v) in &sys.rows()[r as usize].1 {
                dense[local(c)] = field.reduce_i64(v);
            }
            dense
        })
        .collect();
    let pivots = rref_in_place(&mut rows, ncols, p);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free = (0..ncols).filter(|&c| !is_pivot[c]).collect();
    BlockSolution {
        rank: pivots.len(),
        pivots,
        free,
        rref: rows,
    }
}

/// All blocks of a system reduced modulo one prime.
#[derive(Clone, Debug)]
pub struct ModularSolution {
    pub prime: PrimeField,
    pub blocks: Vec<BlockSolution>,
}

impl ModularSolution {
    pub fn nullity(&self) -> usize {
        self.blocks.iter().map(BlockSolution::nullity).sum()
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank).sum()
    }
}

/// Solves every block in parallel; the result does not depend on the
/// thread count.
pub fn solve(sys: &TangencySystem, field: &PrimeField) -> ModularSolution {
    let blocks = sys.blocks().par_iter().map(|b| solve_block(sys, b, field)).collect();
    ModularSolution { prime: *field, blocks }
}

/// Kernel dimension and canonical basis of a system, the basis given as
/// sparse `(global unknown, value)` lists.
pub fn nullspace(sys: &TangencySystem, field: &PrimeField) -> (usize, Vec<Vec<(u32, u64)>>) {
    let sol = solve(sys, field);
    let p = field.modulus();
    let mut basis = Vec::with_capacity(sol.nullity());
    for (block, bs) in sys.blocks().iter().zip(&sol.blocks) {
        for k in 0..bs.nullity() {
            let v = bs.null_vector(k, p);
            basis.push(
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0)
                    .map(|(i, x)| (block.columns[i], *x))
                    .collect(),
            );
        }
    }
    (sol.nullity(), basis)
}

/// Incrementally built row echelon form used for rank tests.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    /// Rows with a leading one, sorted by pivot column.
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(field: &PrimeField) -> Self {
        Echelon {
            p: field.modulus(),
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the rows so far.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for (c, row) in &self.rows {
            let f = v[*c];
            if f != 0 {
                for (x, &y) in v[*c..].iter_mut().zip(&row[*c..]) {
                    if y != 0 {
                        *x = sub_mod(*x, mul_mod(f, y, p), p);
                    }
                }
            }
        }
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[c], p).expect("nonzero");
        for x in v[c..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let at = self.rows.partition_point(|(pc, _)| *pc < c);
        self.rows.insert(at, (c, v));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Arrangement;

    const P: u64 = 4_611_686_018_427_388_039;

    #[test]
    fn rref_small() {
        let p = 7;
        let mut rows = vec![vec![0, 2, 4], vec![1, 1, 1], vec![1, 2, 3]];
        let piv = rref_in_place(&mut rows, 3, p);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(rows, vec![vec![1, 0, 6], vec![0, 1, 2]]);
    }

    #[test]
    fn echelon_rank() {
        let f = PrimeField::new(P).unwrap();
        let mut e = Echelon::new(&f);
        assert!(e.insert(vec![0, 1, 2]));
        assert!(e.insert(vec![1, 1, 0]));
        assert!(!e.insert(vec![1, 2, 2]));
        assert!(!e.insert(vec![0, 0, 0]));
        assert!(e.insert(vec![0, 0, 5]));
        assert_eq!(e.rank(), 3);
    }

    #[test]
    fn full_arrangement_has_no_constant_derivations() {
        let f = PrimeField::new(P).unwrap();
        let arr = Arrangement::from_ids(&(1..=10).collect::<Vec<_>>()).unwrap();
        let sys = TangencySystem::build(&arr, 0);
        assert_eq!(nullspace(&sys, &f).0, 0);
        let cone = Arrangement::from_ids(&[1, 2, 3]).unwrap();
        let (dim, basis) = nullspace(&TangencySystem::build(&cone, 0), &f);
        assert_eq!(dim, 3);
        // the partials along the unused column: x5, y5, z5
        let mut cols: Vec<u32> = basis.iter().map(|v| v[0].0).collect();
        cols.sort_unstable();
        assert_eq!(cols, vec![4, 9, 14]);
    }

    #[test]
    fn five_minor_degree_one() {
        let f = PrimeField::new(P).unwrap();
        let arr = Arrangement::from_ids(&[1, 2, 3, 4, 5]).unwrap();
        let sys = TangencySystem::build(&arr, 1);
        assert_eq!(solve(&sys, &f).nullity(), 15);
    }

    #[test]
    fn empty_system_is_full() {
        let f = PrimeField::new(P).unwrap();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        assert!(rref_in_place(&mut rows, 4, f.modulus()).is_empty());
    }
}
