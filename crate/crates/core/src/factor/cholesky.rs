//! Sparse Cholesky factorization of PSD matrices with dropped null pivots.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stiffness::{dot, norm, orthonormalize, project_out, SparseSymmetricMatrix};

/// Pivots at or below this fraction of the largest diagonal entry are
/// treated as null directions.
pub const DROP_TOL: f64 = 1e-9;
/// Relative size of a null-space component tolerated by [`CholeskyFactor::solve`].
pub const RANGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorStats {
    pub core_vertices: usize,
    pub fill_nnz: usize,
    pub dropped_pivots: usize,
    pub factor_seconds: f64,
}

/// `P B P^T = L L^T` with `L` lower triangular carrying the pivot square
/// roots. Columns whose pivot was dropped are zero.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    /// `perm[k]` is the original index eliminated at step `k`.
    perm: Vec<usize>,
    /// Column `k` of `L`: diagonal first, then `(row, value)` below it
    /// in increasing row order.
    cols: Vec<Vec<(usize, f64)>>,
    dropped: Vec<bool>,
    null_basis: Vec<Vec<f64>>,
    stats: FactorStats,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Original indices whose pivots were dropped.
    pub fn zero_pivot_mask(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&k| self.dropped[k])
            .map(|k| self.perm[k])
            .collect()
    }

    pub fn stats(&self) -> FactorStats {
        self.stats
    }

    /// Orthonormal basis of `null(B)` read off the factor.
    pub fn null_basis(&self) -> &[Vec<f64>] {
        &self.null_basis
    }

    /// Entries of `L` as `(row, col, value)` in permuted coordinates.
    pub fn l_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    /// `P L L^T P^T` as a dense matrix.
    pub fn reconstruct_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut l = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.l_entries() {
            l[(self.perm[r], c)] = v;
        }
        &l * l.transpose()
    }

    /// Solves `L L^T z = c` in permuted coordinates, skipping dropped indices.
    fn solve_permuted(&self, c: &mut [f64]) {
        for k in 0..self.dim {
            if self.dropped[k] {
                c[k] = 0.0;
                continue;
            }
            let col = &self.cols[k];
            c[k] /= col[0].1;
            let ck = c[k];
            for &(r, v) in &col[1..] {
                c[r] -= v * ck;
            }
        }
        for k in (0..self.dim).rev() {
            if self.dropped[k] {
                continue;
            }
            let col = &self.cols[k];
            let mut s = c[k];
            for &(r, v) in &col[1..] {
                s -= v * c[r];
            }
            c[k] = s / col[0].1;
        }
    }

    /// Solve without the range check: the right-hand side is used as given.
    pub fn solve_unchecked(&self, rhs: &[f64]) -> Vec<f64> {
        let mut c: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        self.solve_permuted(&mut c);
        let mut x = vec![0.0; self.dim];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = c[k];
        }
        x
    }

    /// Returns `y` with `B y = rhs`. `rhs` must be orthogonal to `null(B)`
    /// up to [`RANGE_TOL`] relative.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.len(),
            });
        }
        let size = norm(rhs);
        if size == 0.0 {
            return Ok(vec![0.0; self.dim]);
        }
        let off: f64 = self
            .null_basis
            .iter()
            .map(|q| dot(rhs, q).powi(2))
            .sum::<f64>()
            .sqrt();
        if off > RANGE_TOL * size {
            return Err(Error::RhsNotInRange(off / size));
        }
        Ok(self.solve_unchecked(rhs))
    }

    /// Solves `B [x; y] = [b; 0]` and returns `x`, which satisfies
    /// `B_S x = b` for the Schur complement onto the leading `b.len()`
    /// coordinates.
    pub fn solve_schur(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() > self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: b.len(),
            });
        }
        let mut padded = b.to_vec();
        padded.resize(self.dim, 0.0);
        let mut y = self.solve(&padded)?;
        y.truncate(b.len());
        Ok(y)
    }
}

/// Factors `b` eliminating indices in `order` (a permutation of `0..dim`).
/// `core_vertices` is only recorded in the statistics.
pub fn factorize(b: &SparseSymmetricMatrix, order: &[usize], core_vertices: usize) -> Result<CholeskyFactor> {
    let start = Instant::now();
    let dim = b.dim();
    if order.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: order.len(),
        });
    }
    let mut pos = vec![usize::MAX; dim];
    for (k, &p) in order.iter().enumerate() {
        if p >= dim || pos[p] != usize::MAX {
            return Err(Error::InvariantViolated("elimination order is not a permutation".into()));
        }
        pos[p] = k;
    }
    let scale = b.diagonal().into_iter().fold(0.0, f64::max);
    let tol = DROP_TOL * scale;

    // working columns of the permuted matrix, lower part, keyed by row
    let mut work: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); dim];
    for &(r, c, v) in b.lower() {
        let (pr, pc) = (pos[r], pos[c]);
        let (hi, lo) = (pr.max(pc), pr.min(pc));
        *work[lo].entry(hi).or_insert(0.0) += v;
    }

    let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(dim);
    let mut dropped = vec![false; dim];
    for k in 0..dim {
        let col = std::mem::take(&mut work[k]);
        let pivot = col.get(&k).copied().unwrap_or(0.0);
        if pivot <= tol {
            if pivot < -tol {
                return Err(Error::NotPsd {
                    column: order[k],
                    pivot,
                });
            }
            dropped[k] = true;
            cols.push(vec![(k, 0.0)]);
            continue;
        }
        let d = pivot.sqrt();
        let mut lcol = Vec::with_capacity(col.len());
        lcol.push((k, d));
        for (&r, &v) in col.range(k + 1..) {
            lcol.push((r, v / d));
        }
        // right-looking update of the trailing columns
        for a in 1..lcol.len() {
            let (ra, va) = lcol[a];
            let target = &mut work[ra];
            for &(rb, vb) in &lcol[a..] {
                *target.entry(rb).or_insert(0.0) -= va * vb;
            }
        }
        cols.push(lcol);
    }

    let fill_nnz = cols.iter().enumerate().filter(|(k, _)| !dropped[*k]).map(|(_, c)| c.len()).sum();
    let mut factor = CholeskyFactor {
        dim,
        perm: order.to_vec(),
        cols,
        dropped,
        null_basis: Vec::new(),
        stats: FactorStats {
            core_vertices,
            fill_nnz,
            dropped_pivots: 0,
            factor_seconds: 0.0,
        },
    };
    factor.null_basis = factor_null_basis(&factor);
    factor.stats.dropped_pivots = factor.dropped.iter().filter(|d| **d).count();
    factor.stats.factor_seconds = start.elapsed().as_secs_f64();
    Ok(factor)
}

/// For each dropped index `d`: `w_d = 1`, other dropped entries 0, and
/// `L^T w = 0` on the retained rows.
fn factor_null_basis(f: &CholeskyFactor) -> Vec<Vec<f64>> {
    let mut basis = Vec::new();
    for d in (0..f.dim).filter(|&k| f.dropped[k]) {
        let mut w = vec![0.0; f.dim];
        w[d] = 1.0;
        for k in (0..f.dim).rev() {
            if f.dropped[k] {
                continue;
            }
            let col = &f.cols[k];
            let s: f64 = col[1..].iter().map(|&(r, v)| v * w[r]).sum();
            w[k] = -s / col[0].1;
        }
        let mut x = vec![0.0; f.dim];
        for (k, &p) in f.perm.iter().enumerate() {
            x[p] = w[k];
        }
        basis.push(x);
    }
    orthonormalize(&basis)
}

/// Projects `x` onto the orthogonal complement of the factor's null space.
pub fn project_range(f: &CholeskyFactor, x: &mut [f64]) {
    project_out(x, &f.null_basis);
}
