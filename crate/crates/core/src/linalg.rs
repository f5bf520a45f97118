//! Dense/sparse matrix storage used by the data-driven problem families.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Compressed sparse row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a CSR matrix from `(row, col, value)` triplets (0-based).
    /// Duplicate coordinates are summed; explicit zeros are kept.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidInput(format!(
                    "entry ({r}, {c}) outside a {nrows}x{ncols} matrix"
                )));
            }
            sorted.push((r, c, v));
        }
        sorted.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map(|i| vals[i]).unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                dense[(r, c)] += v;
            }
        }
        dense
    }
}

/// A real matrix in either dense or CSR storage.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignMatrix {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
}

impl DesignMatrix {
    pub fn nrows(&self) -> usize {
        match self {
            DesignMatrix::Dense(m) => m.nrows(),
            DesignMatrix::Sparse(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            DesignMatrix::Dense(m) => m.ncols(),
            DesignMatrix::Sparse(m) => m.ncols(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match self {
            DesignMatrix::Dense(m) => m[(r, c)],
            DesignMatrix::Sparse(m) => m.get(r, c),
        }
    }

    /// `A x`
    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            DesignMatrix::Dense(m) => m * x,
            DesignMatrix::Sparse(m) => {
                let mut out = DVector::zeros(m.nrows);
                for r in 0..m.nrows {
                    let (cols, vals) = m.row(r);
                    out[r] = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
                }
                out
            }
        }
    }

    /// `Aᵀ y`
    pub fn tr_mul_vec(&self, y: &DVector<f64>) -> DVector<f64> {
        match self {
            DesignMatrix::Dense(m) => m.tr_mul(y),
            DesignMatrix::Sparse(m) => {
                let mut out = DVector::zeros(m.ncols);
                for r in 0..m.nrows {
                    let (cols, vals) = m.row(r);
                    let yr = y[r];
                    for (&c, &v) in cols.iter().zip(vals) {
                        out[c] += v * yr;
                    }
                }
                out
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            DesignMatrix::Dense(m) => m.clone(),
            DesignMatrix::Sparse(m) => m.to_dense(),
        }
    }

    /// Nonzero entries of row `r` as `(column, value)` pairs.
    pub fn row_entries(&self, r: usize) -> Vec<(usize, f64)> {
        match self {
            DesignMatrix::Dense(m) => m
                .row(r)
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(c, v)| (c, *v))
                .collect(),
            DesignMatrix::Sparse(m) => {
                let (cols, vals) = m.row(r);
                cols.iter().copied().zip(vals.iter().copied()).collect()
            }
        }
    }
}

impl From<DMatrix<f64>> for DesignMatrix {
    fn from(m: DMatrix<f64>) -> Self {
        DesignMatrix::Dense(m)
    }
}

impl From<CsrMatrix> for DesignMatrix {
    fn from(m: CsrMatrix) -> Self {
        DesignMatrix::Sparse(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_and_dense_products_agree() {
        let trip = [(0, 1, 3.0), (1, 0, -2.0), (2, 2, 0.5), (2, 0, 1.0), (2, 0, 1.0)];
        let sparse = CsrMatrix::from_triplets(3, 3, &trip).unwrap();
        assert_eq!(sparse.get(2, 0), 2.0);
        let dense = DesignMatrix::Dense(sparse.to_dense());
        let sparse = DesignMatrix::Sparse(sparse);
        let x = DVector::from_vec(vec![1.0, -1.0, 2.0]);
        assert_eq!(sparse.mul_vec(&x), dense.mul_vec(&x));
        assert_eq!(sparse.tr_mul_vec(&x), dense.tr_mul_vec(&x));
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        assert!(CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }
}
