//! Right-preconditioned BiCGStab and the dense vector kernels it uses.

mod bicgstab;
pub mod vector;

use serde::Serialize;

pub use bicgstab::{bicgstab, ExitCondition, ReorderKind, SolveResult, SolverConfig};
pub use vector::{axpy, dot, norm};

use crate::error::SolverError;
use crate::matrix::CsrMatrix;

pub const SOLVE_REPORT_SCHEMA: &str = "solver-kit.solve.v1";

/// The serialisable summary of a solve. The solution vector is left out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub schema: &'static str,
    pub converged: bool,
    pub iterations: f64,
    pub initial_residual_norm: f64,
    pub conv_threshold: f64,
    pub final_residual_norm: f64,
    pub residual_history: Vec<f64>,
    pub setup_time_ms: f64,
    pub wall_time_ms: f64,
    pub n_colors: Option<usize>,
    pub config: SolverConfig,
}

impl SolveResult {
    pub fn report(&self, config: &SolverConfig) -> SolveReport {
        SolveReport {
            schema: SOLVE_REPORT_SCHEMA,
            converged: self.converged,
            iterations: self.iterations,
            initial_residual_norm: self.initial_residual_norm,
            conv_threshold: self.conv_threshold,
            final_residual_norm: self.final_residual_norm,
            residual_history: self.residual_history.clone(),
            setup_time_ms: self.setup_time_ms,
            wall_time_ms: self.wall_time_ms,
            n_colors: self.n_colors,
            config: *config,
        }
    }
}

/// `‖b − A x‖₂`
pub fn true_residual_norm(a: &CsrMatrix, b: &[f64], x: &[f64]) -> Result<f64, SolverError> {
    let ax = a.spmv(x)?;
    if b.len() != ax.len() {
        return Err(crate::error::MatrixError::DimensionMismatch { expected: ax.len(), found: b.len() }.into());
    }
    let mut acc = 0.0;
    for (bi, yi) in b.iter().zip(&ax) {
        acc += (bi - yi) * (bi - yi);
    }
    Ok(acc.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRun {
    pub reorder: &'static str,
    pub converged: bool,
    pub iterations: f64,
    pub final_residual_norm: f64,
    pub n_colors: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub runs: Vec<ConsistencyRun>,
    /// Largest `‖x_i − x_j‖ / ‖x_i‖` over all pairs of runs.
    pub max_relative_difference: f64,
}

/// Solves the same system with no reordering, level scheduling and graph
/// coloring and compares the solutions. `cfg.reorder` is ignored except
/// for the coloring seed.
pub fn solve_reordered_consistency(
    a: &CsrMatrix,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<ConsistencyReport, SolverError> {
    let seed = match cfg.reorder {
        ReorderKind::GraphColoring { seed, .. } => seed,
        _ => 0,
    };
    let kinds = [
        ReorderKind::None,
        ReorderKind::LevelScheduling,
        ReorderKind::GraphColoring { seed, max_rows_per_color: None },
    ];
    let x0 = vec![0.0; a.n_rows()];
    let mut runs = Vec::new();
    let mut solutions = Vec::new();
    for kind in kinds {
        let res = bicgstab(a, b, &x0, &cfg.with_reorder(kind))?;
        runs.push(ConsistencyRun {
            reorder: kind.label(),
            converged: res.converged,
            iterations: res.iterations,
            final_residual_norm: res.final_residual_norm,
            n_colors: res.n_colors,
        });
        solutions.push(res.x);
    }
    let mut worst: f64 = 0.0;
    for i in 0..solutions.len() {
        for j in 0..solutions.len() {
            if i == j {
                continue;
            }
            let base = norm(&solutions[i]);
            let diff: Vec<f64> = solutions[i].iter().zip(&solutions[j]).map(|(p, q)| p - q).collect();
            let rel = if base == 0.0 { norm(&diff) } else { norm(&diff) / base };
            worst = worst.max(rel);
        }
    }
    Ok(ConsistencyReport { runs, max_relative_difference: worst })
}
