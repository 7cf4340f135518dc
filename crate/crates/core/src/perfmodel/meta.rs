use serde::{Deserialize, Serialize};

use crate::error::{Error, ModelError};
use crate::matrix::CsrMatrix;
use crate::precond::IluFactors;
use crate::reorder::{apply_reorder, ReorderPlan};
use crate::sparstition::{build_partitions, ColorSizes, PartitionSet};

/// What the model knows about one partitioned matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub n: usize,
    pub nnz: usize,
    pub colors: Vec<ColorSizes>,
}

impl MatrixMeta {
    /// Checks that the per-color rows sum to `n` and nonzeros to `nnz`.
    pub fn new(n: usize, nnz: usize, colors: Vec<ColorSizes>) -> Result<Self, ModelError> {
        let rows: usize = colors.iter().map(|c| c.n_rows).sum();
        let nz: usize = colors.iter().map(|c| c.n_nonzeros).sum();
        if rows != n || nz != nnz {
            return Err(ModelError::InvalidConfig(format!(
                "color sizes sum to {rows} rows and {nz} nonzeros, expected {n} and {nnz}"
            )));
        }
        if let Some(c) = colors.iter().find(|c| c.n_vector_indices > n) {
            return Err(ModelError::InvalidConfig(format!(
                "color reads {} vector indices from a vector of length {n}",
                c.n_vector_indices
            )));
        }
        Ok(Self { n, nnz, colors })
    }

    pub fn from_partitions(n: usize, parts: &PartitionSet) -> Result<Self, ModelError> {
        Self::new(n, parts.total_nonzeros(), parts.sizes().to_vec())
    }

    /// `a` must already be in the plan's order.
    pub fn from_matrix(a: &CsrMatrix, plan: &ReorderPlan) -> Result<Self, ModelError> {
        let parts = build_partitions(a, plan).map_err(|e| ModelError::InvalidConfig(e.to_string()))?;
        Self::from_partitions(a.n_rows(), &parts)
    }

    /// Spreads `n` rows and `nnz` nonzeros as evenly as possible over
    /// `n_colors` colors. With columns drawn uniformly, a color with `m`
    /// nonzeros touches about `n·(1 − exp(−m/n))` distinct vector entries.
    pub fn synthetic(n: usize, nnz: usize, n_colors: usize) -> Result<Self, ModelError> {
        if n_colors == 0 && (n > 0 || nnz > 0) {
            return Err(ModelError::InvalidConfig("a non-empty matrix needs at least one color".into()));
        }
        let share = |total: usize, c: usize| total / n_colors + usize::from(c < total % n_colors);
        let colors = (0..n_colors)
            .map(|c| {
                let m = share(nnz, c);
                let k = if n == 0 { 0 } else { (n as f64 * (1.0 - (-(m as f64) / n as f64).exp())).round() as usize };
                ColorSizes { n_rows: share(n, c), n_nonzeros: m, n_vector_indices: k.min(m).min(n) }
            })
            .collect();
        Self::new(n, nnz, colors)
    }

    pub fn n_colors(&self) -> usize {
        self.colors.len()
    }
}

/// Metas of the strict lower and strict upper ILU0 factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorsMeta {
    pub lower: MatrixMeta,
    pub upper: MatrixMeta,
}

impl FactorsMeta {
    /// `factors` must come from the matrix permuted by `plan`.
    pub fn from_factors(factors: &IluFactors, plan: &ReorderPlan) -> Result<Self, ModelError> {
        Ok(Self {
            lower: MatrixMeta::from_matrix(factors.lower(), plan)?,
            upper: MatrixMeta::from_matrix(&factors.upper(), plan)?,
        })
    }

    pub fn synthetic(n: usize, lower_nnz: usize, upper_nnz: usize, n_colors: usize) -> Result<Self, ModelError> {
        Ok(Self {
            lower: MatrixMeta::synthetic(n, lower_nnz, n_colors)?,
            upper: MatrixMeta::synthetic(n, upper_nnz, n_colors)?,
        })
    }
}

/// Partition metas of `a` and of its ILU0 factors under `plan`, with `a`
/// given in its original order.
pub fn solver_metas(a: &CsrMatrix, plan: &ReorderPlan) -> Result<(MatrixMeta, FactorsMeta), Error> {
    let permuted = apply_reorder(a, plan)?;
    let factors = IluFactors::factor(&permuted)?;
    Ok((MatrixMeta::from_matrix(&permuted, plan)?, FactorsMeta::from_factors(&factors, plan)?))
}
