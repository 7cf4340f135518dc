use super::CsrMatrix;
use crate::error::MatrixError;

/// Block CSR with square `block_size` x `block_size` dense blocks, each block
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BsrMatrix {
    block_size: usize,
    n_block_rows: usize,
    n_block_cols: usize,
    block_values: Vec<f64>,
    block_col_indices: Vec<usize>,
    block_row_pointers: Vec<usize>,
}

impl BsrMatrix {
    pub fn new(
        block_size: usize,
        n_block_rows: usize,
        n_block_cols: usize,
        block_row_pointers: Vec<usize>,
        block_col_indices: Vec<usize>,
        block_values: Vec<f64>,
    ) -> Result<Self, MatrixError> {
        if block_size == 0 {
            return Err(MatrixError::ZeroBlockSize);
        }
        let area = block_size * block_size;
        if block_values.len() != block_col_indices.len() * area {
            return Err(MatrixError::DimensionMismatch {
                expected: block_col_indices.len() * area,
                found: block_values.len(),
            });
        }
        // reuse the scalar validator on the block pattern
        let pattern = CsrMatrix::new(
            n_block_rows,
            n_block_cols,
            block_row_pointers,
            block_col_indices,
            vec![0.0; block_values.len() / area],
        )?;
        let (_, _, block_row_pointers, block_col_indices, _) = pattern.into_parts();
        Ok(Self { block_size, n_block_rows, n_block_cols, block_values, block_col_indices, block_row_pointers })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn n_block_rows(&self) -> usize {
        self.n_block_rows
    }

    pub fn n_block_cols(&self) -> usize {
        self.n_block_cols
    }

    pub fn n_blocks(&self) -> usize {
        self.block_col_indices.len()
    }

    pub fn block_values(&self) -> &[f64] {
        &self.block_values
    }

    pub fn block_col_indices(&self) -> &[usize] {
        &self.block_col_indices
    }

    pub fn block_row_pointers(&self) -> &[usize] {
        &self.block_row_pointers
    }

    /// Dense row-major expansion, for tests and small inspections.
    pub fn to_dense(&self) -> Vec<f64> {
        let bs = self.block_size;
        let n_cols = self.n_block_cols * bs;
        let mut dense = vec![0.0; self.n_block_rows * bs * n_cols];
        for br in 0..self.n_block_rows {
            for b in self.block_row_pointers[br]..self.block_row_pointers[br + 1] {
                let bc = self.block_col_indices[b];
                for r in 0..bs {
                    for c in 0..bs {
                        dense[(br * bs + r) * n_cols + bc * bs + c] = self.block_values[b * bs * bs + r * bs + c];
                    }
                }
            }
        }
        dense
    }
}

/// Expands a blocked matrix into scalar CSR.
///
/// With `drop_zeros`, zeros stored inside blocks are omitted except on the
/// scalar diagonal, which stays explicit so ILU0 always finds its pivot.
pub fn unblock_bsr(a: &BsrMatrix, drop_zeros: bool) -> CsrMatrix {
    let bs = a.block_size;
    let n_rows = a.n_block_rows * bs;
    let n_cols = a.n_block_cols * bs;
    let mut row_pointers = Vec::with_capacity(n_rows + 1);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    row_pointers.push(0);
    for br in 0..a.n_block_rows {
        let blocks = a.block_row_pointers[br]..a.block_row_pointers[br + 1];
        for r in 0..bs {
            let row = br * bs + r;
            for b in blocks.clone() {
                let bc = a.block_col_indices[b];
                for c in 0..bs {
                    let col = bc * bs + c;
                    let v = a.block_values[b * bs * bs + r * bs + c];
                    if drop_zeros && v == 0.0 && row != col {
                        continue;
                    }
                    col_indices.push(col);
                    values.push(v);
                }
            }
            row_pointers.push(values.len());
        }
    }
    CsrMatrix::from_parts_unchecked(n_rows, n_cols, row_pointers, col_indices, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_block() -> BsrMatrix {
        BsrMatrix::new(2, 1, 1, vec![0, 1], vec![0], vec![1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn drop_zeros_keeps_diagonal_only() {
        let a = unblock_bsr(&identity_block(), true);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.col_indices(), &[0, 1]);
    }

    #[test]
    fn keep_zeros_stores_full_block() {
        let a = unblock_bsr(&identity_block(), false);
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.values(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_on_scalar_diagonal_survives() {
        let b = BsrMatrix::new(2, 1, 1, vec![0, 1], vec![0], vec![0.0, 5.0, 0.0, 0.0]).unwrap();
        let a = unblock_bsr(&b, true);
        assert_eq!(a.get(0, 0), Some(0.0));
        assert_eq!(a.get(1, 1), Some(0.0));
        assert_eq!(a.get(0, 1), Some(5.0));
        assert_eq!(a.get(1, 0), None);
    }

    #[test]
    fn interleaves_blocks_by_scalar_row() {
        // two blocks in one block row: scalar row 0 must list cols 0,1,2,3 in order
        let vals: Vec<f64> = (1..=8).map(f64::from).collect();
        let b = BsrMatrix::new(2, 1, 2, vec![0, 2], vec![0, 1], vals).unwrap();
        let a = unblock_bsr(&b, false);
        assert_eq!(a.row(0), (&[0usize, 1, 2, 3][..], &[1.0, 2.0, 5.0, 6.0][..]));
        assert_eq!(a.row(1), (&[0usize, 1, 2, 3][..], &[3.0, 4.0, 7.0, 8.0][..]));
    }

    #[test]
    fn rejects_zero_block_size() {
        assert_eq!(
            BsrMatrix::new(0, 1, 1, vec![0, 0], vec![], vec![]).unwrap_err(),
            MatrixError::ZeroBlockSize
        );
    }
}
