use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{
    bench, thread_pool, CliError, Command, ConvertArgs, ConvertTarget, DseArgs, DseFormat, InspectArgs, ModelArgs,
    ModelSource, ReorderArg, ReorderArgs, SolveArgs, EXIT_NOT_CONVERGED, EXIT_OK,
};
use crate::error::Error;
use crate::matrix::{csr_to_csro, load_matrix, write_matrix_market, CsrMatrix};
use crate::perfmodel::{
    dse_grid, dse_sweep, model_solver, solver_metas, write_dse_csv, FactorsMeta, MatrixMeta, PerfEstimate,
};
use crate::reorder::{apply_reorder, ReorderPlan};
use crate::solver::{bicgstab, true_residual_norm, ReorderKind, SolveReport, SolverConfig};
use crate::sparstition::{build_partitions, ColorSizes};

pub(super) fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Convert(a) => convert(a, out),
        Command::Inspect(a) => inspect(a, out),
        Command::Reorder(a) => reorder(a, out),
        Command::Solve(a) => solve(a, out),
        Command::Bench(a) => bench::run(a, out),
        Command::Model(a) => model(a, out),
        Command::Dse(a) => dse(a, out),
    }
}

fn load(path: &Path) -> Result<CsrMatrix, CliError> {
    load_matrix(path).map_err(|e| {
        let mut e = CliError::from(e);
        e.message = format!("{}: {}", path.display(), e.message);
        e
    })
}

/// Runs `f` against the file at `path`, or against `out` when there is none.
fn emit(path: Option<&Path>, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        _ => f(out),
    }
}

fn emit_json<T: Serialize>(path: Option<&Path>, out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    emit(path, out, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Invalid(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })
}

fn convert(a: ConvertArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let m = load(&a.input)?;
    emit(Some(&a.output), out, |w| {
        match a.to {
            ConvertTarget::Csro => csr_to_csro(&m).write_to(w)?,
            ConvertTarget::CsrText => w.write_all(write_matrix_market(&m).as_bytes())?,
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct InspectReport {
    schema: &'static str,
    n_rows: usize,
    n_cols: usize,
    nnz: usize,
    density: f64,
    structurally_symmetric: bool,
    missing_diagonal: usize,
    zero_diagonal: usize,
    empty_rows: usize,
    min_row_nnz: usize,
    max_row_nnz: usize,
}

fn inspect(a: InspectArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let m = load(&a.input)?;
    let row_nnz: Vec<usize> = (0..m.n_rows()).map(|i| m.row_nnz(i)).collect();
    let diag = m.n_rows().min(m.n_cols());
    let cells = m.n_rows() as f64 * m.n_cols() as f64;
    let report = InspectReport {
        schema: "solver-kit.inspect.v1",
        n_rows: m.n_rows(),
        n_cols: m.n_cols(),
        nnz: m.nnz(),
        density: if cells > 0.0 { m.nnz() as f64 / cells } else { 0.0 },
        structurally_symmetric: m.is_square() && m.is_structurally_symmetric(),
        missing_diagonal: (0..diag).filter(|&i| m.diagonal_index(i).is_none()).count(),
        zero_diagonal: (0..diag).filter(|&i| m.get(i, i) == Some(0.0)).count(),
        empty_rows: row_nnz.iter().filter(|&&k| k == 0).count(),
        min_row_nnz: row_nnz.iter().copied().min().unwrap_or(0),
        max_row_nnz: row_nnz.iter().copied().max().unwrap_or(0),
    };
    emit_json(None, out, &report)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ReorderReport {
    schema: &'static str,
    method: crate::reorder::ReorderMethod,
    seed: Option<u64>,
    n_rows: usize,
    n_colors: usize,
    color_offsets: Vec<usize>,
    color_sizes: Vec<ColorSizes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutation: Option<Vec<usize>>,
}

fn reorder(a: ReorderArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let kind = match a.method {
        ReorderArg::None => return Err(CliError::usage("reorder needs --method level or color")),
        ReorderArg::Level => ReorderKind::LevelScheduling,
        ReorderArg::Color => ReorderKind::GraphColoring { seed: a.seed, max_rows_per_color: a.max_rows_per_color },
    };
    let m = load(&a.input)?;
    let plan = kind.plan(&m)?.expect("a method was chosen");
    let permuted = apply_reorder(&m, &plan)?;
    let parts = build_partitions(&permuted, &plan)?;
    let summary = plan.summary();
    let report = ReorderReport {
        schema: "solver-kit.reorder.v1",
        method: summary.method,
        seed: summary.seed,
        n_rows: plan.len(),
        n_colors: summary.n_colors,
        color_offsets: summary.color_offsets,
        color_sizes: parts.sizes().to_vec(),
        permutation: a.with_permutation.then_some(summary.permutation),
    };
    emit_json(a.output.as_deref(), out, &report)?;
    Ok(EXIT_OK)
}

/// Right-hand side choices for `solve`.
pub(super) fn build_rhs(spec: &str, a: &CsrMatrix) -> Result<(Vec<f64>, String), CliError> {
    let n = a.n_rows();
    match spec {
        "ones" => Ok((vec![1.0; n], "ones".into())),
        "a-ones" => Ok((a.spmv(&vec![1.0; a.n_cols()])?, "a-ones".into())),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::from(Error::Io(e)))?;
            let values = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or(""))
                .flat_map(str::split_whitespace)
                .map(|t| t.parse::<f64>().map_err(|_| CliError::usage(format!("{path}: '{t}' is not a number"))))
                .collect::<Result<Vec<_>, _>>()?;
            if values.len() != n {
                return Err(CliError::usage(format!("{path}: expected {n} right-hand side values, found {}", values.len())));
            }
            Ok((values, path.to_string()))
        }
    }
}

#[derive(Serialize)]
struct Modeled {
    total_cycles: u64,
    wall_time_ms: f64,
    gflops: f64,
}

#[derive(Serialize)]
struct SolveOutput {
    #[serde(flatten)]
    report: SolveReport,
    matrix: PathBuf,
    n: usize,
    nnz: usize,
    rhs: String,
    true_residual_norm: f64,
    /// `max |x_i − 1|`, reported when `b = A·1`
    #[serde(skip_serializing_if = "Option::is_none")]
    solution_error_inf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modeled: Option<Modeled>,
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg_model = a.model.then(|| a.knobs.config(&a.point));
    if let Some(c) = &cfg_model {
        c.validate()?;
    }
    let m = load(&a.input)?;
    let (b, rhs) = build_rhs(&a.rhs, &m)?;
    let cfg = SolverConfig::relative(a.reduction)
        .with_preconditioner(a.precond.into())
        .with_reorder(a.reorder.kind())
        .with_max_iterations(a.max_iter as usize);
    let x0 = vec![0.0; m.n_rows()];
    let res = bicgstab(&m, &b, &x0, &cfg)?;
    let modeled = match cfg_model {
        Some(pc) => {
            let (meta, factors) = model_inputs(&m, a.reorder.kind())?;
            let e = model_solver(&meta, &factors, &pc, res.iterations)?;
            Some(Modeled { total_cycles: e.total_cycles, wall_time_ms: e.wall_time_ms, gflops: e.gflops })
        }
        None => None,
    };
    let output = SolveOutput {
        report: res.report(&cfg),
        matrix: a.input.clone(),
        n: m.n_rows(),
        nnz: m.nnz(),
        solution_error_inf: (rhs == "a-ones").then(|| res.x.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)),
        rhs,
        true_residual_norm: true_residual_norm(&m, &b, &res.x)?,
        modeled,
    };
    if let Some(path) = &a.solution {
        emit(Some(path), out, |w| {
            for v in &res.x {
                writeln!(w, "{v:?}")?;
            }
            Ok(())
        })?;
    }
    emit_json(a.output.as_deref(), out, &output)?;
    Ok(if res.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Without a reordering the whole matrix is a single color.
pub(super) fn model_inputs(a: &CsrMatrix, kind: ReorderKind) -> Result<(MatrixMeta, FactorsMeta), CliError> {
    let plan = kind.plan(a)?.unwrap_or_else(|| ReorderPlan::identity(a.n_rows()));
    Ok(solver_metas(a, &plan)?)
}

fn source_metas(s: &ModelSource) -> Result<(MatrixMeta, FactorsMeta, String), CliError> {
    if let Some([n, nnz, l, u, colors]) = s.synthetic {
        let meta = MatrixMeta::synthetic(n, nnz, colors)?;
        let factors = FactorsMeta::synthetic(n, l, u, colors)?;
        return Ok((meta, factors, format!("synthetic:{n},{nnz},{l},{u},{colors}")));
    }
    let path = s.input.as_ref().expect("clap requires input or --synthetic");
    let m = load(path)?;
    let kind = match s.reorder {
        ReorderArg::None => ReorderKind::None,
        ReorderArg::Level => ReorderKind::LevelScheduling,
        ReorderArg::Color => ReorderKind::GraphColoring { seed: s.seed, max_rows_per_color: s.max_rows_per_color },
    };
    let (meta, factors) = model_inputs(&m, kind)?;
    Ok((meta, factors, path.display().to_string()))
}

#[derive(Serialize)]
struct ModelReport {
    schema: &'static str,
    source: String,
    n: usize,
    nnz: usize,
    n_colors: usize,
    estimate: PerfEstimate,
}

fn model(a: ModelArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = a.knobs.config(&a.point);
    cfg.validate()?;
    let (meta, factors, source) = source_metas(&a.source)?;
    let estimate = model_solver(&meta, &factors, &cfg, a.source.iters)?;
    let report = ModelReport {
        schema: "solver-kit.model.v1",
        source,
        n: meta.n,
        nnz: meta.nnz,
        n_colors: meta.n_colors(),
        estimate,
    };
    emit_json(a.output.as_deref(), out, &report)?;
    Ok(EXIT_OK)
}

fn dse(a: DseArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let base = a.knobs.config(&super::PerfPoint { mults: 8, bandwidth: 50.0, ports: 2 });
    let grid = dse_grid(&base, &a.mults, &a.bandwidth, &a.ports);
    // reject the whole grid before any matrix work
    if grid.is_empty() {
        return Err(crate::error::ModelError::EmptyGrid.into());
    }
    for c in &grid {
        c.validate()?;
    }
    let (meta, factors, _) = source_metas(&a.source)?;
    let pool = thread_pool()?;
    let report = pool.install(|| dse_sweep(&meta, &factors, a.source.iters, &grid))?;
    match a.format {
        DseFormat::Csv => emit(a.output.as_deref(), out, |w| {
            write_dse_csv(&report, w).map_err(|e| Error::Invalid(e.to_string()))?;
            Ok(())
        })?,
        DseFormat::Json => emit_json(a.output.as_deref(), out, &report)?,
    }
    Ok(EXIT_OK)
}
