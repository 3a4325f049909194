//! Linear systems over the two-element field with word-packed rows.

use crate::error::{Precondition, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gf2Solution {
    Solvable(Vec<bool>),
    Unsolvable,
}

impl Gf2Solution {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Gf2Solution::Solvable(_))
    }
}

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn pack(bits: &[bool]) -> Vec<u64> {
    let mut w = vec![0u64; words(bits.len())];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            w[i / 64] |= 1 << (i % 64);
        }
    }
    w
}

#[inline]
fn get(w: &[u64], i: usize) -> bool {
    (w[i / 64] >> (i % 64)) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn dot(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() & 1 == 1
}

/// Gauss-Jordan factorization of a coefficient matrix, reusable for many right-hand sides.
/// Pivots are taken at the least available column.
#[derive(Clone, Debug)]
pub struct Elimination {
    ncols: usize,
    nrows: usize,
    /// Reduced rows: coefficients and the combination of original rows producing them.
    coeffs: Vec<Vec<u64>>,
    combos: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Elimination {
    pub fn new(rows: &[Vec<bool>], ncols: usize) -> Result<Elimination> {
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Precondition::DimensionMismatch.into());
        }
        let nrows = rows.len();
        let mut coeffs: Vec<Vec<u64>> = rows.iter().map(|r| pack(r)).collect();
        let mut combos: Vec<Vec<u64>> = (0..nrows)
            .map(|i| {
                let mut w = vec![0u64; words(nrows)];
                w[i / 64] |= 1 << (i % 64);
                w
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..ncols {
            let Some(p) = (r..nrows).find(|&i| get(&coeffs[i], col)) else { continue };
            coeffs.swap(r, p);
            combos.swap(r, p);
            let (pc, pk) = (coeffs[r].clone(), combos[r].clone());
            for i in 0..nrows {
                if i != r && get(&coeffs[i], col) {
                    xor_into(&mut coeffs[i], &pc);
                    xor_into(&mut combos[i], &pk);
                }
            }
            pivots.push(col);
            r += 1;
        }
        Ok(Elimination { ncols, nrows, coeffs, combos, pivots })
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.ncols - self.rank()
    }

    pub fn solve(&self, rhs: &[bool]) -> Result<Gf2Solution> {
        if rhs.len() != self.nrows {
            return Err(Precondition::DimensionMismatch.into());
        }
        let b = pack(rhs);
        for i in self.rank()..self.nrows {
            if dot(&self.combos[i], &b) {
                return Ok(Gf2Solution::Unsolvable);
            }
        }
        let mut x = vec![false; self.ncols];
        for (i, &col) in self.pivots.iter().enumerate() {
            x[col] = dot(&self.combos[i], &b);
        }
        debug_assert!(self.coeffs.len() == self.nrows);
        Ok(Gf2Solution::Solvable(x))
    }
}

/// Solves `rows · x = rhs`.
pub fn gf2_solve(rows: &[Vec<bool>], ncols: usize, rhs: &[bool]) -> Result<Gf2Solution> {
    Elimination::new(rows, ncols)?.solve(rhs)
}
