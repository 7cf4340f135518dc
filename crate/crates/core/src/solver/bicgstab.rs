use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::vector::{axpy_in_place, dot_unchecked, norm};
use crate::error::{BreakdownKind, MatrixError, SolverError};
use crate::matrix::CsrMatrix;
use crate::precond::{PrecondKind, Preconditioner};
use crate::reorder::{apply_reorder, apply_reorder_vector, graph_color, level_schedule, Direction, ReorderPlan};

/// How the stopping threshold is derived from the initial residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitCondition {
    /// stop once `‖r‖ ≤ ‖r₀‖ · reduction`
    Relative { reduction: f64 },
    /// stop once `‖r‖ ≤ threshold`
    Absolute { threshold: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReorderKind {
    #[default]
    None,
    LevelScheduling,
    GraphColoring { seed: u64, max_rows_per_color: Option<usize> },
}

impl ReorderKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::LevelScheduling => "level",
            Self::GraphColoring { .. } => "color",
        }
    }

    /// Computes the plan for `a`, or `None` when no reordering is requested.
    pub fn plan(&self, a: &CsrMatrix) -> Result<Option<ReorderPlan>, SolverError> {
        let to_solver = |e: crate::error::ReorderError| match e {
            crate::error::ReorderError::Matrix(m) => SolverError::Matrix(m),
            other => SolverError::InvalidConfig(other.to_string()),
        };
        Ok(match *self {
            Self::None => None,
            Self::LevelScheduling => Some(level_schedule(a).map_err(to_solver)?),
            Self::GraphColoring { seed, max_rows_per_color } => {
                Some(graph_color(a, seed, max_rows_per_color).map_err(to_solver)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub exit: ExitCondition,
    pub preconditioner: PrecondKind,
    pub reorder: ReorderKind,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            exit: ExitCondition::Relative { reduction: 1e-2 },
            preconditioner: PrecondKind::None,
            reorder: ReorderKind::None,
        }
    }
}

impl SolverConfig {
    pub fn relative(reduction: f64) -> Self {
        Self { exit: ExitCondition::Relative { reduction }, ..Self::default() }
    }

    pub fn with_preconditioner(mut self, kind: PrecondKind) -> Self {
        self.preconditioner = kind;
        self
    }

    pub fn with_reorder(mut self, reorder: ReorderKind) -> Self {
        self.reorder = reorder;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.max_iterations == 0 {
            return Err(SolverError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        match self.exit {
            ExitCondition::Relative { reduction } if !(reduction > 0.0 && reduction < 1.0) => {
                Err(SolverError::InvalidConfig(format!("reduction must lie in (0, 1), got {reduction}")))
            }
            ExitCondition::Absolute { threshold } if !(threshold >= 0.0 && threshold.is_finite()) => {
                Err(SolverError::InvalidConfig(format!("absolute threshold must be finite and >= 0, got {threshold}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub initial_residual_norm: f64,
    pub conv_threshold: f64,
    pub final_residual_norm: f64,
    /// Counted in half iterations: a stop after the first half-step adds 0.5.
    pub iterations: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    pub setup_time_ms: f64,
    pub wall_time_ms: f64,
    pub n_colors: Option<usize>,
}

/// Solves `A x = b` with right-preconditioned BiCGStab starting from `x0`.
///
/// When `cfg.reorder` is set the system is permuted, solved in permuted
/// order (ILU0 then runs color by color) and the solution is permuted back.
/// Running out of iterations is not an error; the result carries
/// `converged = false` and the last iterate.
pub fn bicgstab(a: &CsrMatrix, b: &[f64], x0: &[f64], cfg: &SolverConfig) -> Result<SolveResult, SolverError> {
    cfg.validate()?;
    if !a.is_square() {
        return Err(MatrixError::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() }.into());
    }
    let n = a.n_rows();
    for len in [b.len(), x0.len()] {
        if len != n {
            return Err(MatrixError::DimensionMismatch { expected: n, found: len }.into());
        }
    }

    let setup_start = Instant::now();
    let plan = cfg.reorder.plan(a)?;
    let reordered;
    let (matrix, rhs, start) = match &plan {
        Some(plan) => {
            reordered = apply_reorder(a, plan).expect("plan built from this matrix");
            let rhs = apply_reorder_vector(b, plan, Direction::Forward).expect("length checked");
            let start = apply_reorder_vector(x0, plan, Direction::Forward).expect("length checked");
            (&reordered, rhs, start)
        }
        None => (a, b.to_vec(), x0.to_vec()),
    };
    let precond = Preconditioner::build(cfg.preconditioner, matrix, plan.as_ref())?;
    let setup_time_ms = setup_start.elapsed().as_secs_f64() * 1e3;

    let solve_start = Instant::now();
    let mut result = iterate(matrix, &rhs, start, &precond, cfg)?;
    result.wall_time_ms = solve_start.elapsed().as_secs_f64() * 1e3;
    result.setup_time_ms = setup_time_ms;
    if let Some(plan) = &plan {
        result.x = apply_reorder_vector(&result.x, plan, Direction::Inverse).expect("length checked");
        result.n_colors = Some(plan.n_colors());
    }
    Ok(result)
}

/// The BiCGStab recurrence on an already prepared system.
fn iterate(
    a: &CsrMatrix,
    b: &[f64],
    mut x: Vec<f64>,
    precond: &Preconditioner,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolverError> {
    let n = a.n_rows();
    let mut r = a.spmv(&x)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let rt = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut scratch = Vec::new();

    let mut rho = 0.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut residual = norm(&r);
    let initial = residual;
    let threshold = match cfg.exit {
        ExitCondition::Relative { reduction } => initial * reduction,
        ExitCondition::Absolute { threshold } => threshold,
    };
    let mut history = vec![residual];
    let mut iterations = 0.0;
    let mut full_iterations = 0usize;
    let breakdown = |kind, iterations| Err(SolverError::Breakdown { kind, iterations });
    if !residual.is_finite() {
        return breakdown(BreakdownKind::NonFinite, 0.0);
    }

    while residual > threshold && full_iterations < cfg.max_iterations {
        let rho_new = dot_unchecked(&rt, &r);
        if rho_new == 0.0 {
            return breakdown(BreakdownKind::Rho, iterations);
        }
        // first pass: beta = 0 and p = r
        let beta = if full_iterations == 0 {
            0.0
        } else {
            if omega == 0.0 {
                return breakdown(BreakdownKind::Omega, iterations);
            }
            (rho_new / rho) * (alpha / omega)
        };
        for ((pi, ri), vi) in p.iter_mut().zip(&r).zip(&v) {
            *pi = ri + beta * (*pi - omega * vi);
        }
        precond.apply_into(&p, &mut y, &mut scratch)?;
        a.spmv_into(&y, &mut v)?;
        let rtv = dot_unchecked(&rt, &v);
        if rtv == 0.0 {
            return breakdown(BreakdownKind::RtV, iterations);
        }
        alpha = rho_new / rtv;
        rho = rho_new;
        axpy_in_place(alpha, &y, &mut x);
        axpy_in_place(-alpha, &v, &mut r);
        residual = norm(&r);
        history.push(residual);
        if !residual.is_finite() {
            return breakdown(BreakdownKind::NonFinite, iterations);
        }
        if residual <= threshold {
            iterations += 0.5;
            break;
        }

        precond.apply_into(&r, &mut y, &mut scratch)?;
        a.spmv_into(&y, &mut t)?;
        let tt = dot_unchecked(&t, &t);
        if tt == 0.0 {
            return breakdown(BreakdownKind::TT, iterations);
        }
        omega = dot_unchecked(&t, &r) / tt;
        axpy_in_place(omega, &y, &mut x);
        axpy_in_place(-omega, &t, &mut r);
        residual = norm(&r);
        history.push(residual);
        full_iterations += 1;
        iterations += 1.0;
        if !residual.is_finite() {
            return breakdown(BreakdownKind::NonFinite, iterations);
        }
    }

    Ok(SolveResult {
        x,
        initial_residual_norm: initial,
        conv_threshold: threshold,
        final_residual_norm: residual,
        iterations,
        converged: residual <= threshold,
        residual_history: history,
        setup_time_ms: 0.0,
        wall_time_ms: 0.0,
        n_colors: None,
    })
}
