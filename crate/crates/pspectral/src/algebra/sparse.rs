//! Compressed sparse matrix storage.
//!
//! Matrices are kept in both row-compressed and column-compressed form so
//! that `vxm` can walk a column of the matrix in ascending row order without
//! any transpose logic at kernel time. Symmetric operators store both
//! triangles explicitly.

use super::AlgebraError;

/// An `nrows x ncols` sparse matrix with explicit entries only.
///
/// Invariants: no duplicate `(row, col)` pairs; column indices strictly
/// increasing within each row; all indices in range. Both invariants are
/// enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    nrows: usize,
    ncols: usize,
    // CSR
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    row_val: Vec<T>,
    // CSC mirror, row indices ascending within each column
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    col_val: Vec<T>,
}

impl<T: Copy> SparseMatrix<T> {
    /// Builds a matrix from `(row, col, value)` triples in any order.
    pub fn from_triples(
        nrows: usize,
        ncols: usize,
        triples: &[(usize, usize, T)],
    ) -> Result<Self, AlgebraError> {
        let mut sorted: Vec<(usize, usize, T)> = Vec::with_capacity(triples.len());
        for &(r, c, v) in triples {
            if r >= nrows || c >= ncols {
                return Err(AlgebraError::IndexOutOfRange {
                    row: r,
                    col: c,
                    nrows,
                    ncols,
                });
            }
            sorted.push((r, c, v));
        }
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(AlgebraError::DuplicateEntry {
                    row: w[0].0,
                    col: w[0].1,
                });
            }
        }

        let mut row_ptr = vec![0usize; nrows + 1];
        for &(r, _, _) in &sorted {
            row_ptr[r + 1] += 1;
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx: Vec<usize> = sorted.iter().map(|t| t.1).collect();
        let row_val: Vec<T> = sorted.iter().map(|t| t.2).collect();

        // CSC mirror.
        let mut csorted = sorted;
        csorted.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        let mut col_ptr = vec![0usize; ncols + 1];
        for &(_, c, _) in &csorted {
            col_ptr[c + 1] += 1;
        }
        for j in 0..ncols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let row_idx: Vec<usize> = csorted.iter().map(|t| t.0).collect();
        let col_val: Vec<T> = csorted.iter().map(|t| t.2).collect();

        Ok(SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            row_val,
            col_ptr,
            row_idx,
            col_val,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.row_val.len()
    }

    /// Entries of row `i` as `(col, value)` pairs, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .zip(&self.row_val[lo..hi])
            .map(|(&c, &v)| (c, v))
    }

    /// Entries of column `j` as `(row, value)` pairs, rows ascending.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let lo = self.col_ptr[j];
        let hi = self.col_ptr[j + 1];
        self.row_idx[lo..hi]
            .iter()
            .zip(&self.col_val[lo..hi])
            .map(|(&r, &v)| (r, v))
    }

    /// All stored entries as `(row, col, value)`, row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Looks up a single entry; `None` when not stored.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => Some(self.row_val[lo + k]),
            Err(_) => None,
        }
    }

    /// Rebuilds the matrix with every stored value passed through `f`,
    /// preserving the sparsity pattern.
    pub fn map_values<U: Copy>(&self, mut f: impl FnMut(usize, usize, T) -> U) -> SparseMatrix<U> {
        let triples: Vec<(usize, usize, U)> =
            self.triples().map(|(i, j, v)| (i, j, f(i, j, v))).collect();
        SparseMatrix::from_triples(self.nrows, self.ncols, &triples)
            .expect("pattern already validated")
    }

    /// The identity matrix under plus-times, with `one` on the diagonal.
    pub fn identity(n: usize, one: T) -> Self {
        let triples: Vec<(usize, usize, T)> = (0..n).map(|i| (i, i, one)).collect();
        SparseMatrix::from_triples(n, n, &triples).expect("identity triples are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        let err = SparseMatrix::from_triples(2, 2, &[(0, 1, 1.0), (0, 1, 2.0)]).unwrap_err();
        assert!(matches!(err, AlgebraError::DuplicateEntry { row: 0, col: 1 }));
    }

    #[test]
    fn rejects_out_of_range() {
        let err = SparseMatrix::from_triples(2, 2, &[(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, AlgebraError::IndexOutOfRange { .. }));
    }

    #[test]
    fn row_and_col_views_agree() {
        let a = SparseMatrix::from_triples(3, 3, &[(0, 2, 1.0), (1, 0, 2.0), (2, 2, 3.0)]).unwrap();
        assert_eq!(a.row(1).collect::<Vec<_>>(), vec![(0, 2.0)]);
        assert_eq!(a.col(2).collect::<Vec<_>>(), vec![(0, 1.0), (2, 3.0)]);
        assert_eq!(a.get(2, 2), Some(3.0));
        assert_eq!(a.get(0, 0), None);
        assert_eq!(a.nnz(), 3);
    }
}
