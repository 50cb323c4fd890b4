//! Row-compressed sparse matrix of 3x3 blocks acting on concatenated vertex
//! vectors.

use nalgebra::{DMatrix, Matrix3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::Vec3;

/// Sparse block operator with `n_rows x n_cols` blocks of size 3x3.
///
/// Rows are stored in ascending order with column indices sorted inside each
/// row, so every application sums in a fixed order regardless of thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBlockOperator {
    n_cols: usize,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    blocks: Vec<Matrix3<f64>>,
}

impl SparseBlockOperator {
    /// An operator with `n_rows` empty rows.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            cols: Vec::new(),
            blocks: Vec::new(),
        }
    }

    /// Builds from per-row `(column, block)` entries. Duplicate columns
    /// within a row are summed in the order given.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, Matrix3<f64>)>>) -> Result<Self> {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut blocks = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, block) in row {
                if c >= n_cols {
                    return Err(Error::IndexOutOfRange {
                        index: c,
                        len: n_cols,
                    });
                }
                let start = *row_offsets.last().unwrap();
                if cols.len() > start && *cols.last().unwrap() == c {
                    *blocks.last_mut().unwrap() += block;
                } else {
                    cols.push(c);
                    blocks.push(block);
                }
            }
            row_offsets.push(cols.len());
        }
        Ok(Self {
            n_cols,
            row_offsets,
            cols,
            blocks,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `(column, block)` pairs of row `i`, ascending by column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &Matrix3<f64>)> {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.cols[range.clone()].iter().copied().zip(&self.blocks[range])
    }

    pub fn row_is_empty(&self, i: usize) -> bool {
        self.row_offsets[i] == self.row_offsets[i + 1]
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|x| x.is_finite()))
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Vec3]) -> Result<Vec<Vec3>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: x.len(),
            });
        }
        Ok((0..self.n_rows())
            .into_par_iter()
            .map(|i| self.row(i).fold(Vec3::zeros(), |acc, (c, b)| acc + b * x[c]))
            .collect())
    }

    /// The transposed operator, with rows in ascending order of the original
    /// columns and entries in ascending order of the original rows.
    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, Matrix3<f64>)>> = vec![Vec::new(); self.n_cols];
        for i in 0..self.n_rows() {
            for (c, b) in self.row(i) {
                rows[c].push((i, b.transpose()));
            }
        }
        Self::from_rows(self.n_rows(), rows).expect("transposed indices are in range")
    }

    /// Dense `3 n_rows x 3 n_cols` matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(3 * self.n_rows(), 3 * self.n_cols);
        for i in 0..self.n_rows() {
            for (c, b) in self.row(i) {
                let mut view = m.fixed_view_mut::<3, 3>(3 * i, 3 * c);
                view += b;
            }
        }
        m
    }
}

/// Flattens vertex vectors into a `3N` column.
pub fn flatten(x: &[Vec3]) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_iterator(3 * x.len(), x.iter().flat_map(|v| v.iter().copied()))
}

/// Inverse of [`flatten`].
pub fn unflatten(x: &nalgebra::DVector<f64>) -> Vec<Vec3> {
    x.as_slice()
        .chunks_exact(3)
        .map(|c| Vec3::new(c[0], c[1], c[2]))
        .collect()
}

pub(crate) fn dot(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

pub(crate) fn norm_sq(a: &[Vec3]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum()
}

pub(crate) fn max_abs(a: &[Vec3]) -> f64 {
    a.iter().map(|x| x.amax()).fold(0.0, f64::max)
}
