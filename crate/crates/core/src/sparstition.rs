//! Per-color vector partitions.
//!
//! Each color of a reordered matrix is one partition. For every partition we
//! record which vector indices its rows read, so a kernel can fetch just
//! those values from a shared, unpartitioned vector.

use serde::{Deserialize, Serialize};

use crate::error::{MatrixError, ReorderError};
use crate::matrix::CsrMatrix;
use crate::reorder::ReorderPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ColorSizes {
    pub n_rows: usize,
    pub n_nonzeros: usize,
    pub n_vector_indices: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartitionSet {
    vector_partition_indices: Vec<Vec<usize>>,
    sizes: Vec<ColorSizes>,
}

impl PartitionSet {
    pub fn n_colors(&self) -> usize {
        self.sizes.len()
    }

    /// Sorted, deduplicated vector indices read by color `c`.
    pub fn indices(&self, c: usize) -> &[usize] {
        &self.vector_partition_indices[c]
    }

    pub fn sizes(&self) -> &[ColorSizes] {
        &self.sizes
    }

    pub fn total_nonzeros(&self) -> usize {
        self.sizes.iter().map(|s| s.n_nonzeros).sum()
    }

    pub fn total_vector_indices(&self) -> usize {
        self.sizes.iter().map(|s| s.n_vector_indices).sum()
    }
}

/// Builds one partition per color of `plan` over the rows of `a`, which must
/// already be in the plan's (permuted) order. `a` may be any matrix with the
/// plan's row count, e.g. the strict lower or upper part of an ILU0 factor.
pub fn build_partitions(a: &CsrMatrix, plan: &ReorderPlan) -> Result<PartitionSet, ReorderError> {
    if a.n_rows() != plan.len() {
        return Err(ReorderError::PlanMismatch { plan: plan.len(), matrix: a.n_rows() });
    }
    let mut seen = vec![usize::MAX; a.n_cols()];
    let mut out = PartitionSet::default();
    for c in 0..plan.n_colors() {
        let rows = plan.color_rows(c);
        let mut indices = Vec::new();
        let mut nnz = 0usize;
        for row in rows.clone() {
            let (cols, _) = a.row(row);
            nnz += cols.len();
            for &col in cols {
                if seen[col] != c {
                    seen[col] = c;
                    indices.push(col);
                }
            }
        }
        indices.sort_unstable();
        out.sizes.push(ColorSizes { n_rows: rows.len(), n_nonzeros: nnz, n_vector_indices: indices.len() });
        out.vector_partition_indices.push(indices);
    }
    Ok(out)
}

/// `out[k] = x[indices[k]]`
pub fn gather(x: &[f64], indices: &[usize]) -> Result<Vec<f64>, ReorderError> {
    indices
        .iter()
        .map(|&i| x.get(i).copied().ok_or(ReorderError::IndexOutOfBounds { index: i, len: x.len() }))
        .collect()
}

pub(crate) fn gather_into(x: &[f64], indices: &[usize], out: &mut Vec<f64>) {
    out.clear();
    out.extend(indices.iter().map(|&i| x[i]));
}

/// Computes the rows of one color using only that color's gathered vector
/// values. Column indices are mapped into the partition by binary search.
pub fn spmv_color(
    a: &CsrMatrix,
    plan: &ReorderPlan,
    parts: &PartitionSet,
    color: usize,
    gathered: &[f64],
) -> Result<Vec<f64>, MatrixError> {
    let indices = parts.indices(color);
    if gathered.len() != indices.len() {
        return Err(MatrixError::DimensionMismatch { expected: indices.len(), found: gathered.len() });
    }
    Ok(plan
        .color_rows(color)
        .map(|row| {
            let (cols, vals) = a.row(row);
            let mut acc = 0.0;
            for (&col, &v) in cols.iter().zip(vals) {
                let local = indices.binary_search(&col).expect("column belongs to the partition");
                acc += v * gathered[local];
            }
            acc
        })
        .collect())
}
