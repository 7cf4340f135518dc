//! Compressed Sparse Row-Offsets.
//!
//! CSRO keeps the CSR value and column arrays but replaces the row pointers
//! with one offset per nonzero: `0` when the value continues the row of the
//! previous value, otherwise `1 + (number of empty rows skipped)`. The first
//! value is measured against a virtual row `-1`, so a matrix whose first row
//! is populated starts with offset `1`. Empty rows after the last populated
//! row are carried only by `n_rows`.

use std::io::{Read, Write};

use super::CsrMatrix;
use crate::error::{CsroIoError, MatrixError};

pub const CSRO_MAGIC: &[u8; 4] = b"CSRO";
pub const CSRO_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct CsroMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    col_indices: Vec<usize>,
    new_row_offsets: Vec<usize>,
}

impl CsroMatrix {
    /// Validates the offset encoding against `n_rows` and the column bound.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        values: Vec<f64>,
        col_indices: Vec<usize>,
        new_row_offsets: Vec<usize>,
    ) -> Result<Self, MatrixError> {
        if values.len() != col_indices.len() {
            return Err(MatrixError::ArrayLength { values: values.len(), cols: col_indices.len() });
        }
        if new_row_offsets.len() != values.len() {
            return Err(MatrixError::DimensionMismatch {
                expected: values.len(),
                found: new_row_offsets.len(),
            });
        }
        if new_row_offsets.first() == Some(&0) {
            return Err(MatrixError::LeadingZeroOffset);
        }
        let mut rows_implied = 0usize;
        for &offset in &new_row_offsets {
            rows_implied = rows_implied.saturating_add(offset);
            if rows_implied > n_rows {
                return Err(MatrixError::OffsetOverflow { implied: rows_implied, n_rows });
            }
        }
        // columns must ascend within each row, same as canonical CSR
        let mut row = 0usize;
        for v in 0..values.len() {
            row += new_row_offsets[v];
            let col = col_indices[v];
            if col >= n_cols {
                return Err(MatrixError::ColumnOutOfBounds { row: row - 1, col, n_cols });
            }
            if v > 0 && new_row_offsets[v] == 0 && col_indices[v - 1] >= col {
                return Err(MatrixError::UnsortedRow { row: row - 1 });
            }
        }
        Ok(Self { n_rows, n_cols, values, col_indices, new_row_offsets })
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

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn new_row_offsets(&self) -> &[usize] {
        &self.new_row_offsets
    }

    /// SpMV driven by the offset stream instead of row pointers. Accumulation
    /// order matches [`CsrMatrix::spmv`], so results agree bit for bit.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>, MatrixError> {
        if x.len() != self.n_cols {
            return Err(MatrixError::DimensionMismatch { expected: self.n_cols, found: x.len() });
        }
        let mut y = vec![0.0; self.n_rows];
        let mut row = 0usize;
        let mut acc = 0.0;
        for v in 0..self.values.len() {
            let offset = self.new_row_offsets[v];
            if offset > 0 {
                if v > 0 {
                    y[row - 1] = acc;
                }
                row += offset;
                acc = 0.0;
            }
            acc += self.values[v] * x[self.col_indices[v]];
        }
        if !self.values.is_empty() {
            y[row - 1] = acc;
        }
        Ok(y)
    }

    /// Writes the binary container: magic, version, then the three sizes and
    /// arrays, all little-endian.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), CsroIoError> {
        let mut buf = Vec::with_capacity(28 + self.nnz() * 16);
        buf.extend_from_slice(CSRO_MAGIC);
        buf.extend_from_slice(&CSRO_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n_rows as u64).to_le_bytes());
        buf.extend_from_slice(&(self.n_cols as u64).to_le_bytes());
        buf.extend_from_slice(&(self.nnz() as u64).to_le_bytes());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for &c in &self.col_indices {
            buf.extend_from_slice(&narrow(c, "column index")?.to_le_bytes());
        }
        for &o in &self.new_row_offsets {
            buf.extend_from_slice(&narrow(o, "row offset")?.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CsroIoError> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, CsroIoError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CsroIoError> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != CSRO_MAGIC {
            return Err(CsroIoError::BadMagic);
        }
        let version = u32::from_le_bytes(cur.array()?);
        if version != CSRO_VERSION {
            return Err(CsroIoError::UnsupportedVersion(version));
        }
        let n_rows = u64::from_le_bytes(cur.array()?) as usize;
        let n_cols = u64::from_le_bytes(cur.array()?) as usize;
        let nnz = u64::from_le_bytes(cur.array()?) as usize;
        let payload = nnz.checked_mul(16).ok_or(CsroIoError::Truncated)?;
        if bytes.len() - cur.pos < payload {
            return Err(CsroIoError::Truncated);
        }
        let values = (0..nnz).map(|_| cur.array().map(f64::from_le_bytes)).collect::<Result<Vec<_>, _>>()?;
        let col_indices = (0..nnz)
            .map(|_| cur.array().map(|b| u32::from_le_bytes(b) as usize))
            .collect::<Result<Vec<_>, _>>()?;
        let offsets = (0..nnz)
            .map(|_| cur.array().map(|b| u32::from_le_bytes(b) as usize))
            .collect::<Result<Vec<_>, _>>()?;
        if cur.pos != bytes.len() {
            return Err(CsroIoError::TrailingBytes(bytes.len() - cur.pos));
        }
        Ok(Self::new(n_rows, n_cols, values, col_indices, offsets)?)
    }
}

fn narrow(value: usize, what: &'static str) -> Result<u32, MatrixError> {
    u32::try_from(value).map_err(|_| MatrixError::IndexTooWide { what, value })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CsroIoError> {
        let end = self.pos.checked_add(n).ok_or(CsroIoError::Truncated)?;
        let out = self.bytes.get(self.pos..end).ok_or(CsroIoError::Truncated)?;
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], CsroIoError> {
        Ok(self.take(N)?.try_into().expect("slice has length N"))
    }
}

/// Encodes a canonical CSR matrix as CSRO. Values and columns keep their order.
pub fn csr_to_csro(a: &CsrMatrix) -> CsroMatrix {
    let mut offsets = Vec::with_capacity(a.nnz());
    // rows are counted from a virtual row -1, hence the +1 shift
    let mut prev_row_plus_one = 0usize;
    for row in 0..a.n_rows() {
        let count = a.row_nnz(row);
        if count == 0 {
            continue;
        }
        offsets.push(row + 1 - prev_row_plus_one);
        offsets.extend(std::iter::repeat_n(0, count - 1));
        prev_row_plus_one = row + 1;
    }
    CsroMatrix {
        n_rows: a.n_rows(),
        n_cols: a.n_cols(),
        values: a.values().to_vec(),
        col_indices: a.col_indices().to_vec(),
        new_row_offsets: offsets,
    }
}

/// Decodes CSRO back to CSR; the exact inverse of [`csr_to_csro`].
pub fn csro_to_csr(a: &CsroMatrix) -> Result<CsrMatrix, MatrixError> {
    let mut row_pointers = vec![0usize; a.n_rows + 1];
    let mut row_plus_one = 0usize;
    for &offset in &a.new_row_offsets {
        row_plus_one += offset;
        if row_plus_one > a.n_rows {
            return Err(MatrixError::OffsetOverflow { implied: row_plus_one, n_rows: a.n_rows });
        }
        row_pointers[row_plus_one] += 1;
    }
    for row in 0..a.n_rows {
        row_pointers[row + 1] += row_pointers[row];
    }
    CsrMatrix::new(a.n_rows, a.n_cols, row_pointers, a.col_indices.clone(), a.values.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> CsrMatrix {
        // row 0 = {(0,a),(2,b)}, row 1 empty, row 2 = {(1,c)}
        CsrMatrix::new(3, 3, vec![0, 2, 2, 3], vec![0, 2, 1], vec![1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn offsets_skip_empty_row() {
        let c = csr_to_csro(&example());
        assert_eq!(c.new_row_offsets(), &[1, 0, 2]);
        assert_eq!(c.col_indices(), &[0, 2, 1]);
    }

    #[test]
    fn inverse_of_example() {
        let c = csr_to_csro(&example());
        let back = csro_to_csr(&c).unwrap();
        assert_eq!(back.row_pointers(), &[0, 2, 2, 3]);
        assert_eq!(back, example());
    }

    #[test]
    fn identity_offsets() {
        assert_eq!(csr_to_csro(&CsrMatrix::identity(4)).new_row_offsets(), &[1, 1, 1, 1]);
    }

    #[test]
    fn single_row_offsets() {
        let a = CsrMatrix::from_triplets(1, 5, (0..5).map(|j| (0, j, 1.0))).unwrap();
        assert_eq!(csr_to_csro(&a).new_row_offsets(), &[1, 0, 0, 0, 0]);
    }

    #[test]
    fn leading_empty_rows_and_trailing_rows() {
        let a = CsrMatrix::from_triplets(6, 6, vec![(2, 1, 1.0), (3, 3, 2.0)]).unwrap();
        let c = csr_to_csro(&a);
        assert_eq!(c.new_row_offsets(), &[3, 1]);
        // sum of offsets = last populated row + 1
        assert_eq!(c.new_row_offsets().iter().sum::<usize>(), 4);
        assert_eq!(csro_to_csr(&c).unwrap(), a);
    }

    #[test]
    fn empty_matrix() {
        let a = CsrMatrix::new(4, 4, vec![0; 5], vec![], vec![]).unwrap();
        let c = csr_to_csro(&a);
        assert!(c.new_row_offsets().is_empty());
        assert_eq!(csro_to_csr(&c).unwrap().row_pointers(), &[0, 0, 0, 0, 0]);
    }

    #[test]
    fn offset_overflow_rejected() {
        assert_eq!(
            CsroMatrix::new(2, 2, vec![1.0, 1.0], vec![0, 0], vec![1, 2]).unwrap_err(),
            MatrixError::OffsetOverflow { implied: 3, n_rows: 2 }
        );
        assert_eq!(
            CsroMatrix::new(2, 2, vec![1.0], vec![0], vec![0]).unwrap_err(),
            MatrixError::LeadingZeroOffset
        );
    }

    #[test]
    fn spmv_matches_csr() {
        let a = example();
        let x = [0.5, -2.0, 4.0];
        assert_eq!(csr_to_csro(&a).spmv(&x).unwrap(), a.spmv(&x).unwrap());
    }

    #[test]
    fn binary_layout() {
        let c = csr_to_csro(&example());
        let bytes = c.to_bytes().unwrap();
        assert_eq!(&bytes[..4], b"CSRO");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(bytes[24..32].try_into().unwrap()), 3);
        assert_eq!(bytes.len(), 32 + 3 * 8 + 3 * 4 + 3 * 4);
        let back = CsroMatrix::from_bytes(&bytes).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_bytes().unwrap(), bytes);
    }

    #[test]
    fn binary_errors() {
        let bytes = csr_to_csro(&example()).to_bytes().unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(CsroMatrix::from_bytes(&bad), Err(CsroIoError::BadMagic)));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(CsroMatrix::from_bytes(&bad), Err(CsroIoError::UnsupportedVersion(9))));
        assert!(matches!(CsroMatrix::from_bytes(&bytes[..bytes.len() - 1]), Err(CsroIoError::Truncated)));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(CsroMatrix::from_bytes(&long), Err(CsroIoError::TrailingBytes(1))));
    }
}
