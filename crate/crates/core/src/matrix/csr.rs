use crate::error::MatrixError;

/// Compressed sparse row matrix in canonical form: column indices within
/// every row are strictly increasing. Explicitly stored zeros are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    col_indices: Vec<usize>,
    row_pointers: Vec<usize>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, rejecting anything non-canonical.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_pointers: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, MatrixError> {
        if row_pointers.len() != n_rows + 1 {
            return Err(MatrixError::RowPointerLength {
                expected: n_rows + 1,
                found: row_pointers.len(),
            });
        }
        if values.len() != col_indices.len() {
            return Err(MatrixError::ArrayLength { values: values.len(), cols: col_indices.len() });
        }
        let nnz = values.len();
        if row_pointers[0] != 0 {
            return Err(MatrixError::RowPointerOrder { row: 0, nnz });
        }
        if row_pointers[n_rows] != nnz {
            return Err(MatrixError::RowPointerOrder { row: n_rows, nnz });
        }
        for row in 0..n_rows {
            let (start, end) = (row_pointers[row], row_pointers[row + 1]);
            if end < start || end > nnz {
                return Err(MatrixError::RowPointerOrder { row, nnz });
            }
            let cols = &col_indices[start..end];
            for (k, &col) in cols.iter().enumerate() {
                if col >= n_cols {
                    return Err(MatrixError::ColumnOutOfBounds { row, col, n_cols });
                }
                if k > 0 && cols[k - 1] >= col {
                    return Err(MatrixError::UnsortedRow { row });
                }
            }
        }
        Ok(Self { n_rows, n_cols, values, col_indices, row_pointers })
    }

    /// Builds a canonical matrix from (row, col, value) triplets in any order.
    /// Duplicate coordinates are summed in input order.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(row, col, _) in &entries {
            if row >= n_rows || col >= n_cols {
                return Err(MatrixError::EntryOutOfBounds { row, col, n_rows, n_cols });
            }
        }
        // stable sort keeps duplicates in input order so their sum is reproducible
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_pointers = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (row, col, value) in entries {
            if last == Some((row, col)) {
                *values.last_mut().expect("duplicate follows an entry") += value;
                continue;
            }
            last = Some((row, col));
            row_pointers[row + 1] += 1;
            col_indices.push(col);
            values.push(value);
        }
        for row in 0..n_rows {
            row_pointers[row + 1] += row_pointers[row];
        }
        Ok(Self { n_rows, n_cols, values, col_indices, row_pointers })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n_rows: n,
            n_cols: n,
            values: diag.to_vec(),
            col_indices: (0..n).collect(),
            row_pointers: (0..=n).collect(),
        }
    }

    /// Dense row-major matrix to CSR, storing every entry that is not exactly zero.
    pub fn from_dense(n_rows: usize, n_cols: usize, dense: &[f64]) -> Result<Self, MatrixError> {
        if dense.len() != n_rows * n_cols {
            return Err(MatrixError::DimensionMismatch { expected: n_rows * n_cols, found: dense.len() });
        }
        let triplets = (0..n_rows).flat_map(|i| {
            (0..n_cols).filter_map(move |j| {
                let v = dense[i * n_cols + j];
                (v != 0.0).then_some((i, j, v))
            })
        });
        Self::from_triplets(n_rows, n_cols, triplets)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn row_pointers(&self) -> &[usize] {
        &self.row_pointers
    }

    /// Column indices and values of one row.
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let range = self.row_pointers[row]..self.row_pointers[row + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    pub fn row_nnz(&self, row: usize) -> usize {
        self.row_pointers[row + 1] - self.row_pointers[row]
    }

    /// Stored value at (row, col), if the position is in the pattern.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let (cols, vals) = self.row(row);
        cols.binary_search(&col).ok().map(|k| vals[k])
    }

    /// Position of the diagonal entry of `row` in the value array.
    pub fn diagonal_index(&self, row: usize) -> Option<usize> {
        let (cols, _) = self.row(row);
        cols.binary_search(&row).ok().map(|k| self.row_pointers[row] + k)
    }

    /// Iterator over (row, col, value) in storage order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |row| {
            let (cols, vals) = self.row(row);
            cols.iter().zip(vals).map(move |(&c, &v)| (row, c, v))
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.n_cols, self.n_rows, self.triplets().map(|(r, c, v)| (c, r, v)))
            .expect("transpose of a valid matrix is valid")
    }

    /// True when the sparsity pattern (not the values) is symmetric.
    pub fn is_structurally_symmetric(&self) -> bool {
        self.is_square()
            && self
                .triplets()
                .all(|(r, c, _)| self.row(c).0.binary_search(&r).is_ok())
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.n_rows * self.n_cols];
        for (r, c, v) in self.triplets() {
            dense[r * self.n_cols + c] = v;
        }
        dense
    }

    /// `y = A x` following the row-by-row, left-to-right accumulation of the
    /// reference CSR kernel.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>, MatrixError> {
        let mut y = vec![0.0; self.n_rows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<(), MatrixError> {
        if x.len() != self.n_cols {
            return Err(MatrixError::DimensionMismatch { expected: self.n_cols, found: x.len() });
        }
        if y.len() != self.n_rows {
            return Err(MatrixError::DimensionMismatch { expected: self.n_rows, found: y.len() });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for v in self.row_pointers[i]..self.row_pointers[i + 1] {
                acc += self.values[v] * x[self.col_indices[v]];
            }
            *yi = acc;
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        row_pointers: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert!(Self::new(n_rows, n_cols, row_pointers.clone(), col_indices.clone(), values.clone()).is_ok());
        Self { n_rows, n_cols, values, col_indices, row_pointers }
    }

    pub fn into_parts(self) -> (usize, usize, Vec<usize>, Vec<usize>, Vec<f64>) {
        (self.n_rows, self.n_cols, self.row_pointers, self.col_indices, self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_rows() {
        let err = CsrMatrix::new(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 2.0]).unwrap_err();
        assert_eq!(err, MatrixError::UnsortedRow { row: 0 });
    }

    #[test]
    fn rejects_duplicate_columns() {
        let err = CsrMatrix::new(1, 3, vec![0, 2], vec![1, 1], vec![1.0, 2.0]).unwrap_err();
        assert_eq!(err, MatrixError::UnsortedRow { row: 0 });
    }

    #[test]
    fn rejects_bad_row_pointers() {
        assert!(matches!(
            CsrMatrix::new(2, 2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]),
            Err(MatrixError::RowPointerOrder { .. })
        ));
        assert!(matches!(
            CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![1.0]),
            Err(MatrixError::RowPointerLength { expected: 3, found: 2 })
        ));
        assert!(matches!(
            CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]),
            Err(MatrixError::ColumnOutOfBounds { row: 0, col: 2, n_cols: 2 })
        ));
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(1, 1, 2.0), (0, 0, 1.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(a.values(), &[1.0, 5.0]);
        assert_eq!(a.row_pointers(), &[0, 1, 2]);
    }

    #[test]
    fn spmv_small() {
        let a = CsrMatrix::from_dense(2, 2, &[2.0, 0.0, 1.0, 3.0]).unwrap();
        assert_eq!(a.spmv(&[1.0, 2.0]).unwrap(), vec![2.0, 7.0]);
    }

    #[test]
    fn spmv_identity() {
        let x = [0.5, -1.0, 3.25];
        assert_eq!(CsrMatrix::identity(3).spmv(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        assert_eq!(
            a.spmv(&[1.0, 2.0]).unwrap_err(),
            MatrixError::DimensionMismatch { expected: 3, found: 2 }
        );
    }
}
