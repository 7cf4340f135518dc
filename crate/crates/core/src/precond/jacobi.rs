use crate::error::{MatrixError, PrecondError};
use crate::matrix::CsrMatrix;

/// Diagonal (Jacobi) preconditioner, `M = diag(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPrecond {
    inverse_diag: Vec<f64>,
}

impl JacobiPrecond {
    pub fn new(a: &CsrMatrix) -> Result<Self, PrecondError> {
        if !a.is_square() {
            return Err(MatrixError::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() }.into());
        }
        let inverse_diag = (0..a.n_rows())
            .map(|row| {
                let d = a.get(row, row).ok_or(PrecondError::MissingDiagonal { row })?;
                let inv = 1.0 / d;
                if d == 0.0 || !inv.is_finite() {
                    return Err(PrecondError::ZeroPivot { row });
                }
                Ok(inv)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { inverse_diag })
    }

    pub fn inverse_diag(&self) -> &[f64] {
        &self.inverse_diag
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, PrecondError> {
        let mut p = vec![0.0; x.len()];
        self.apply_into(x, &mut p)?;
        Ok(p)
    }

    pub fn apply_into(&self, x: &[f64], p: &mut [f64]) -> Result<(), PrecondError> {
        let n = self.inverse_diag.len();
        for len in [x.len(), p.len()] {
            if len != n {
                return Err(MatrixError::DimensionMismatch { expected: n, found: len }.into());
            }
        }
        for ((pi, xi), d) in p.iter_mut().zip(x).zip(&self.inverse_diag) {
            *pi = xi * d;
        }
        Ok(())
    }
}
