//! Dense matrices over a prime field, with exact Gaussian elimination.
//!
//! Everything here is exact arithmetic in `F_p`: no pivoting heuristics or
//! tolerances are involved, a pivot is any nonzero entry. The rank routines
//! share one forward-elimination core; `bounded_rank` stops as soon as `k`
//! pivots are found, which is what the connectivity solvers rely on when
//! they only care about ranks up to `k`.

use crate::field::{FieldContext, FieldElement, FieldError};
use rand::Rng;
use std::ops::Deref;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular (rank {rank})")]
    Singular { rank: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("index {index} out of range for dimension {len}")]
    Index { index: usize, len: usize },
    #[error("duplicate index {0} in index set")]
    DuplicateIndex(usize),
    #[error("operands belong to different field contexts")]
    ContextMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An ordered list of row or column indices without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self, LinalgError> {
        let mut seen = std::collections::HashSet::new();
        for &i in &indices {
            if !seen.insert(i) {
                return Err(LinalgError::DuplicateIndex(i));
            }
        }
        Ok(IndexSet(indices))
    }

    pub fn from_range(r: std::ops::Range<usize>) -> Self {
        IndexSet(r.collect())
    }
}

impl Deref for IndexSet {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// Row-major dense matrix over the prime field of its context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    ctx: FieldContext,
    data: Vec<FieldElement>,
}

impl FpMatrix {
    pub fn zeros(ctx: FieldContext, rows: usize, cols: usize) -> Self {
        FpMatrix {
            rows,
            cols,
            ctx,
            data: vec![FieldElement(0); rows * cols],
        }
    }

    pub fn identity(ctx: FieldContext, n: usize) -> Self {
        let mut m = FpMatrix::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    /// Builds a matrix from row slices of raw integers (canonicalized).
    pub fn from_rows(ctx: FieldContext, rows: &[&[u64]]) -> Result<Self, LinalgError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut m = FpMatrix::zeros(ctx, height, width);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(LinalgError::Dimension(format!(
                    "row {i} has {} entries, expected {width}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, ctx.element(v));
            }
        }
        Ok(m)
    }

    pub fn random<R: Rng + ?Sized>(ctx: FieldContext, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| ctx.random_element(rng)).collect();
        FpMatrix { rows, cols, ctx, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn context(&self) -> FieldContext {
        self.ctx
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn check_ctx(&self, other: &FpMatrix) -> Result<(), LinalgError> {
        if self.ctx != other.ctx {
            return Err(LinalgError::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.check_ctx(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ctx.add(a, b))
            .collect();
        Ok(FpMatrix { rows: self.rows, cols: self.cols, ctx: self.ctx, data })
    }

    pub fn sub(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.check_ctx(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension(format!(
                "{}x{} - {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ctx.sub(a, b))
            .collect();
        Ok(FpMatrix { rows: self.rows, cols: self.cols, ctx: self.ctx, data })
    }

    pub fn matmul(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.check_ctx(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ctx = self.ctx;
        let mut out = FpMatrix::zeros(ctx, self.rows, other.cols);
        // Reduced products fit in 61-63 bits, so a u128 accumulator absorbs
        // any realistic inner dimension without intermediate reductions.
        let mut acc: Vec<u128> = vec![0; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|v| *v = 0);
            for kk in 0..self.cols {
                let a = self.get(i, kk);
                if a.0 == 0 {
                    continue;
                }
                let brow = other.row(kk);
                for (j, &b) in brow.iter().enumerate() {
                    acc[j] += ctx.mul(a, b).0 as u128;
                }
            }
            for (j, &sum) in acc.iter().enumerate() {
                out.set(i, j, ctx.element((sum % ctx.modulus() as u128) as u64));
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Scales column `j` by `diag[j]`, i.e. right-multiplies by a diagonal matrix.
    pub fn scale_cols(&self, diag: &[FieldElement]) -> Result<FpMatrix, LinalgError> {
        if diag.len() != self.cols {
            return Err(LinalgError::Dimension(format!(
                "diagonal of length {} against {} columns",
                diag.len(),
                self.cols
            )));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, &scale) in diag.iter().enumerate() {
                out.set(i, j, self.ctx.mul(self.get(i, j), scale));
            }
        }
        Ok(out)
    }

    pub fn submatrix(&self, row_set: &IndexSet, col_set: &IndexSet) -> Result<FpMatrix, LinalgError> {
        for &i in row_set.iter() {
            if i >= self.rows {
                return Err(LinalgError::Index { index: i, len: self.rows });
            }
        }
        for &j in col_set.iter() {
            if j >= self.cols {
                return Err(LinalgError::Index { index: j, len: self.cols });
            }
        }
        let mut out = FpMatrix::zeros(self.ctx, row_set.len(), col_set.len());
        for (oi, &i) in row_set.iter().enumerate() {
            for (oj, &j) in col_set.iter().enumerate() {
                out.set(oi, oj, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// Forward elimination on a working copy; returns the number of pivots
    /// found, stopping early once `limit` pivots are reached.
    fn eliminate(&self, limit: usize) -> usize {
        let ctx = self.ctx;
        let mut work = self.data.clone();
        let cols = self.cols;
        let mut pivot_row = 0;
        for col in 0..cols {
            if pivot_row >= self.rows || pivot_row >= limit {
                break;
            }
            // First nonzero entry at or below the current row is the pivot.
            let Some(src) = (pivot_row..self.rows).find(|&r| work[r * cols + col].0 != 0) else {
                continue;
            };
            if src != pivot_row {
                for j in col..cols {
                    work.swap(pivot_row * cols + j, src * cols + j);
                }
            }
            let pivot = work[pivot_row * cols + col];
            let pivot_inv = ctx.inv(pivot).expect("pivot is nonzero");
            for r in pivot_row + 1..self.rows {
                let factor = ctx.mul(work[r * cols + col], pivot_inv);
                if factor.0 == 0 {
                    continue;
                }
                work[r * cols + col] = FieldElement(0);
                for j in col + 1..cols {
                    let sub = ctx.mul(factor, work[pivot_row * cols + j]);
                    work[r * cols + j] = ctx.sub(work[r * cols + j], sub);
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }

    /// Exact rank by full elimination.
    pub fn rank(&self) -> usize {
        self.eliminate(usize::MAX)
    }

    /// `min(k, rank)`, computed by halting elimination after `k` pivots.
    pub fn bounded_rank(&self, k: usize) -> Result<usize, LinalgError> {
        if k == 0 {
            return Err(LinalgError::Parameter("rank bound must be at least 1".into()));
        }
        Ok(self.eliminate(k))
    }

    /// Exact inverse by Gauss-Jordan elimination.
    ///
    /// On a singular input the error reports the true rank.
    pub fn inverse(&self) -> Result<FpMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Dimension(format!(
                "inverse of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let ctx = self.ctx;
        let width = 2 * n;
        let mut work = vec![FieldElement(0); n * width];
        for i in 0..n {
            for j in 0..n {
                work[i * width + j] = self.get(i, j);
            }
            work[i * width + n + i] = ctx.one();
        }
        let mut pivot_row = 0;
        for col in 0..n {
            let Some(src) = (pivot_row..n).find(|&r| work[r * width + col].0 != 0) else {
                continue; // singular; keep going to report the true rank
            };
            if src != pivot_row {
                for j in 0..width {
                    work.swap(pivot_row * width + j, src * width + j);
                }
            }
            let pivot_inv = ctx.inv(work[pivot_row * width + col]).expect("pivot is nonzero");
            for j in 0..width {
                work[pivot_row * width + j] = ctx.mul(work[pivot_row * width + j], pivot_inv);
            }
            for r in 0..n {
                if r == pivot_row {
                    continue;
                }
                let factor = work[r * width + col];
                if factor.0 == 0 {
                    continue;
                }
                for j in 0..width {
                    let sub = ctx.mul(factor, work[pivot_row * width + j]);
                    work[r * width + j] = ctx.sub(work[r * width + j], sub);
                }
            }
            pivot_row += 1;
        }
        if pivot_row < n {
            return Err(LinalgError::Singular { rank: pivot_row });
        }
        let mut inv = FpMatrix::zeros(ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, work[i * width + n + j]);
            }
        }
        Ok(inv)
    }
}

/// `(I - LR)^{-1}` computed through the small side: `I + L (I - RL)^{-1} R`.
///
/// `L` is `a x b` and `R` is `b x a`; only the `b x b` system is inverted.
/// `I - RL` is invertible exactly when `I - LR` is, so a singular error here
/// means the large system is singular too.
pub fn low_rank_inverse_update(l: &FpMatrix, r: &FpMatrix) -> Result<FpMatrix, LinalgError> {
    if l.context() != r.context() {
        return Err(LinalgError::ContextMismatch);
    }
    if l.cols() != r.rows() || l.rows() != r.cols() {
        return Err(LinalgError::Dimension(format!(
            "{}x{} and {}x{} are not a factor pair",
            l.rows(),
            l.cols(),
            r.rows(),
            r.cols()
        )));
    }
    let ctx = l.context();
    let rl = r.matmul(l)?;
    let small = FpMatrix::identity(ctx, rl.rows()).sub(&rl)?;
    let small_inv = small.inverse()?;
    let correction = l.matmul(&small_inv)?.matmul(r)?;
    FpMatrix::identity(ctx, l.rows()).add(&correction)
}
