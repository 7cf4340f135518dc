use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::commands::build_rhs;
use super::{thread_pool, BenchArgs, BenchFormat, CliError, EXIT_OK};
use crate::matrix::load_matrix;
use crate::precond::PrecondKind;
use crate::solver::{bicgstab, ReorderKind, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Ok,
    NotConverged,
    Error,
}

#[derive(Debug, Clone, Serialize)]
struct Cell {
    matrix: String,
    n: Option<usize>,
    nnz: Option<usize>,
    precond: &'static str,
    reduction: f64,
    status: Status,
    iterations: Option<f64>,
    solve_ms: Option<f64>,
    setup_ms: Option<f64>,
    message: String,
}

/// Entries of the list file; relative paths resolve against its directory.
fn read_list(list: &Path) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(list)?;
    let base = list.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| base.join(l))
        .collect())
}

fn bench_matrix(path: &Path, reductions: &[f64], reorder: ReorderKind, max_iter: usize) -> Vec<Cell> {
    let name = path.display().to_string();
    let grid = PrecondKind::ALL.iter().flat_map(|&p| reductions.iter().map(move |&r| (p, r)));
    let error_cell = |p: PrecondKind, r: f64, n, nnz, message: String| Cell {
        matrix: name.clone(),
        n,
        nnz,
        precond: p.label(),
        reduction: r,
        status: Status::Error,
        iterations: None,
        solve_ms: None,
        setup_ms: None,
        message,
    };
    let a = match load_matrix(path) {
        Ok(a) => a,
        Err(e) => return grid.map(|(p, r)| error_cell(p, r, None, None, e.to_string())).collect(),
    };
    let (n, nnz) = (Some(a.n_rows()), Some(a.nnz()));
    let b = match build_rhs("a-ones", &a) {
        Ok((b, _)) => b,
        Err(e) => return grid.map(|(p, r)| error_cell(p, r, n, nnz, e.message.clone())).collect(),
    };
    let x0 = vec![0.0; a.n_rows()];
    grid.map(|(p, r)| {
        let cfg = SolverConfig::relative(r).with_preconditioner(p).with_reorder(reorder).with_max_iterations(max_iter);
        match bicgstab(&a, &b, &x0, &cfg) {
            Ok(res) => Cell {
                matrix: name.clone(),
                n,
                nnz,
                precond: p.label(),
                reduction: r,
                status: if res.converged { Status::Ok } else { Status::NotConverged },
                iterations: Some(res.iterations),
                solve_ms: Some(res.wall_time_ms),
                setup_ms: Some(res.setup_time_ms),
                message: String::new(),
            },
            Err(e) => error_cell(p, r, n, nnz, e.to_string()),
        }
    })
    .collect()
}

fn write_csv(cells: &[Cell], w: &mut dyn Write) -> Result<(), CliError> {
    let mut csv = csv::Writer::from_writer(w);
    for c in cells {
        csv.serialize(c).map_err(|e| CliError::usage(e.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}

fn write_markdown(cells: &[Cell], reductions: &[f64], w: &mut dyn Write) -> Result<(), CliError> {
    let columns: Vec<(PrecondKind, f64)> =
        PrecondKind::ALL.iter().flat_map(|&p| reductions.iter().map(move |&r| (p, r))).collect();
    write!(w, "| matrix | N | M |")?;
    for (p, r) in &columns {
        write!(w, " {} {:e} |", p.label(), r)?;
    }
    writeln!(w)?;
    writeln!(w, "|---|---:|---:|{}", "---:|".repeat(columns.len()))?;
    let dash = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
    for row in cells.chunks(columns.len()) {
        let first = &row[0];
        write!(w, "| {} | {} | {} |", first.matrix, dash(first.n), dash(first.nnz))?;
        for c in row {
            let text = match c.status {
                Status::Ok => format!("{:.1} ms ({} it)", c.solve_ms.unwrap_or(0.0), c.iterations.unwrap_or(0.0)),
                Status::NotConverged => {
                    format!("NC {:.1} ms ({} it)", c.solve_ms.unwrap_or(0.0), c.iterations.unwrap_or(0.0))
                }
                Status::Error => format!("ERROR: {}", c.message.replace('|', "/")),
            };
            write!(w, " {text} |")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Runs every preconditioner at every reduction on each listed matrix.
/// Failures become error cells; the table keeps the list order.
pub(super) fn run(a: BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let paths = read_list(&a.list)?;
    let reorder = a.reorder.kind();
    let max_iter = a.max_iter as usize;
    let pool = thread_pool()?;
    let cells: Vec<Cell> = pool.install(|| {
        paths.par_iter().flat_map_iter(|p| bench_matrix(p, &a.reductions, reorder, max_iter)).collect()
    });
    let mut sink: Box<dyn Write + '_> = match &a.output {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(&mut *out),
    };
    match a.format {
        BenchFormat::Csv => write_csv(&cells, &mut sink)?,
        BenchFormat::Markdown => write_markdown(&cells, &a.reductions, &mut sink)?,
    }
    sink.flush()?;
    Ok(EXIT_OK)
}
