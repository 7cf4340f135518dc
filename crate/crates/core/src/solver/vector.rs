//! Dense vector kernels used by the solver. All reductions accumulate
//! sequentially from index 0 upward.

use crate::error::MatrixError;

fn check(x: &[f64], y: &[f64]) -> Result<(), MatrixError> {
    if x.len() == y.len() {
        Ok(())
    } else {
        Err(MatrixError::DimensionMismatch { expected: x.len(), found: y.len() })
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> Result<f64, MatrixError> {
    check(x, y)?;
    Ok(dot_unchecked(x, y))
}

/// `alpha * x + y`
pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Result<Vec<f64>, MatrixError> {
    check(x, y)?;
    Ok(x.iter().zip(y).map(|(xi, yi)| alpha * xi + yi).collect())
}

/// Euclidean norm, `sqrt(dot(x, x))`.
pub fn norm(x: &[f64]) -> f64 {
    dot_unchecked(x, x).sqrt()
}

pub(crate) fn dot_unchecked(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

/// `y = alpha * x + y` in place.
pub(crate) fn axpy_in_place(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(dot(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(dot(&[3.0, -2.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(norm(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(norm(&[3.0, 4.0]), 5.0);
        assert_eq!(norm(&[]), 0.0);
        assert_eq!(axpy(0.0, &[5.0, 6.0], &[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(axpy(1.0, &[5.0, 6.0], &[0.0, 0.0]).unwrap(), vec![5.0, 6.0]);
    }

    #[test]
    fn mismatched_lengths() {
        assert!(dot(&[1.0], &[1.0, 2.0]).is_err());
        assert!(axpy(1.0, &[1.0], &[]).is_err());
    }
}
