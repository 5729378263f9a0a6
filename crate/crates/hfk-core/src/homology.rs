//! GF(2) homology of complex blocks and related checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::complex::{ComplexEngine, Generator};
use crate::cover::FiniteAbelian;
use crate::linalg::sparse_gf2_rank;
use crate::poly::AlexanderPolynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockError {
    #[error("differential {from:?} -> {to:?} leaves its (spin^c, Alexander) block")]
    Straddle { from: Generator, to: Generator },
    #[error("differential {from:?} -> {to:?} changes the grading by {drop}/{denom}, not 1")]
    GradingDrop { from: Generator, to: Generator, drop: i64, denom: i64 },
    #[error("d^2 is nonzero on {0:?}")]
    DSquared(Generator),
}

/// Homology ranks of one block, keyed by grading in units of `1 / denom`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockHomology {
    pub ranks: BTreeMap<i64, u64>,
    pub generators: usize,
    pub edges: usize,
}

/// Boundary of a block in compressed rows: the terms of `d x` are
/// `targets[offsets[x]..offsets[x + 1]]`, as indices into the block.
pub struct BlockBoundary {
    pub offsets: Vec<usize>,
    pub targets: Vec<u32>,
}

/// Computes the boundary restricted to `gens` (sorted), checking that every
/// differential stays inside the block and lowers the grading by exactly `denom`.
pub fn block_boundary(
    engine: &ComplexEngine,
    gens: &[Generator],
    gradings: &[i64],
    denom: i64,
) -> Result<BlockBoundary, BlockError> {
    debug_assert!(gens.windows(2).all(|w| w[0] < w[1]));
    let mut offsets = Vec::with_capacity(gens.len() + 1);
    let mut targets = Vec::new();
    offsets.push(0);
    let mut buf = Vec::new();
    for (ix, &x) in gens.iter().enumerate() {
        engine.differentials_from(x, &mut buf);
        for &y in &buf {
            let iy = gens.binary_search(&y).map_err(|_| BlockError::Straddle { from: x, to: y })?;
            let drop = gradings[ix] - gradings[iy];
            if drop != denom {
                return Err(BlockError::GradingDrop { from: x, to: y, drop, denom });
            }
            targets.push(iy as u32);
        }
        offsets.push(targets.len());
    }
    Ok(BlockBoundary { offsets, targets })
}

impl BlockBoundary {
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, x: usize) -> &[u32] {
        &self.targets[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn edges(&self) -> usize {
        self.targets.len()
    }

    /// Index of the first generator on which `d^2` is nonzero.
    pub fn d_squared_failure(&self) -> Option<usize> {
        let mut acc: Vec<u32> = Vec::new();
        for x in 0..self.len() {
            acc.clear();
            for &y in self.row(x) {
                acc.extend_from_slice(self.row(y as usize));
            }
            acc.sort_unstable();
            let odd = acc.chunk_by(|a, b| a == b).any(|run| run.len() % 2 == 1);
            if odd {
                return Some(x);
            }
        }
        None
    }
}

/// Ranks of homology per grading level.
pub fn homology_ranks(boundary: &BlockBoundary, gradings: &[i64], denom: i64) -> BTreeMap<i64, u64> {
    let mut levels: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (ix, &g) in gradings.iter().enumerate() {
        levels.entry(g).or_default().push(ix);
    }
    let mut local = vec![0u32; gradings.len()];
    for members in levels.values() {
        for (pos, &ix) in members.iter().enumerate() {
            local[ix] = pos as u32;
        }
    }
    let mut rank_of: BTreeMap<i64, usize> = BTreeMap::new();
    for (&g, members) in &levels {
        let Some(targets) = levels.get(&(g - denom)) else {
            rank_of.insert(g, 0);
            continue;
        };
        let rows: Vec<Vec<u32>> = members
            .iter()
            .map(|&ix| boundary.row(ix).iter().map(|&y| local[y as usize]).collect())
            .collect();
        rank_of.insert(g, sparse_gf2_rank(targets.len(), rows));
    }
    let mut out = BTreeMap::new();
    for (&g, members) in &levels {
        let r_out = rank_of[&g];
        let r_in = rank_of.get(&(g + denom)).copied().unwrap_or(0);
        let h = members.len() - r_out - r_in;
        if h > 0 {
            out.insert(g, h as u64);
        }
    }
    out
}

/// Homology of one block, with optional `d^2 = 0` verification.
pub fn block_homology(
    engine: &ComplexEngine,
    gens: &[Generator],
    gradings: &[i64],
    denom: i64,
    check_d_squared: bool,
) -> Result<BlockHomology, BlockError> {
    let boundary = block_boundary(engine, gens, gradings, denom)?;
    if check_d_squared {
        if let Some(x) = boundary.d_squared_failure() {
            return Err(BlockError::DSquared(gens[x]));
        }
    }
    Ok(BlockHomology {
        ranks: homology_ranks(&boundary, gradings, denom),
        generators: gens.len(),
        edges: boundary.edges(),
    })
}

/// Fraction-free determinant.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}

/// `|prod_j Δ(ω^j)|` over the m-th roots of unity, as the determinant of
/// multiplication by Δ on `Z[t] / (t^m - 1)`.
pub fn cyclic_norm(delta: &AlexanderPolynomial, m: usize) -> BigInt {
    let mut a = vec![vec![BigInt::zero(); m]; m];
    for r in 0..m {
        for (&e, &c) in &delta.coeffs {
            let row = (r as i64 + e).rem_euclid(m as i64) as usize;
            a[row][r] += c;
        }
    }
    bareiss_determinant(a).abs()
}

/// Whether the order of `h1` equals the cyclic norm of Δ.
pub fn h1_order_check(delta: &AlexanderPolynomial, m: usize, h1: &FiniteAbelian) -> bool {
    let norm = cyclic_norm(delta, m);
    !norm.is_zero() && norm == BigInt::from(h1.order())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trefoil() -> AlexanderPolynomial {
        AlexanderPolynomial::from_coefficients([(-1, 1), (0, -1), (1, 1)].into_iter().collect())
    }

    #[test]
    fn trefoil_cyclic_norms() {
        assert_eq!(cyclic_norm(&trefoil(), 1), BigInt::from(1));
        assert_eq!(cyclic_norm(&trefoil(), 2), BigInt::from(3));
        assert_eq!(cyclic_norm(&trefoil(), 3), BigInt::from(4));
        assert_eq!(cyclic_norm(&trefoil(), 6), BigInt::from(0));
    }

    #[test]
    fn bareiss_matches_small_determinants() {
        let m = |rows: &[[i64; 3]]| rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(bareiss_determinant(m(&[[2, 0, 1], [1, 3, 2], [1, 1, 2]])), BigInt::from(6));
        assert_eq!(bareiss_determinant(m(&[[2, 0, 1], [1, 3, 2], [1, 1, 1]])), BigInt::from(0));
        assert_eq!(bareiss_determinant(m(&[[0, 1, 0], [1, 0, 0], [0, 0, 5]])), BigInt::from(-5));
    }
}
