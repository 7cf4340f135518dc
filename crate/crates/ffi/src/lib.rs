//! C ABI over `solver-kit`.
//!
//! Matrices live behind an opaque [`SkMatrix`] handle that the caller frees
//! with [`sk_matrix_free`]. Every fallible function returns an [`SkStatus`];
//! on failure the message is available from [`sk_last_error_message`] on the
//! same thread until the next call. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use solver_kit::error::{Error, SolverError};
use solver_kit::matrix::{csr_to_csro, csro_to_csr, load_matrix, read_matrix_market, CsroMatrix};
use solver_kit::perfmodel::{model_solver, solver_metas, PerfConfig};
use solver_kit::precond::PrecondKind;
use solver_kit::reorder::ReorderPlan;
use solver_kit::solver::{bicgstab, ExitCondition, ReorderKind, SolverConfig};
use solver_kit::CsrMatrix;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    IoError = 4,
    MatrixError = 5,
    PrecondError = 6,
    Breakdown = 7,
    /// The solve ran out of iterations; outputs are still filled in.
    NotConverged = 8,
    ModelError = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkPrecond {
    None = 0,
    Jacobi = 1,
    Ilu0 = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkReorder {
    None = 0,
    LevelScheduling = 1,
    GraphColoring = 2,
}

/// Opaque matrix handle.
pub struct SkMatrix {
    inner: CsrMatrix,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SkSolverConfig {
    pub max_iterations: u64,
    /// Relative residual reduction in (0, 1).
    pub reduction: f64,
    pub precond: SkPrecond,
    pub reorder: SkReorder,
    /// Graph coloring seed.
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SkSolveSummary {
    pub converged: bool,
    pub iterations: f64,
    pub initial_residual_norm: f64,
    pub final_residual_norm: f64,
    pub setup_time_ms: f64,
    pub wall_time_ms: f64,
    /// 0 when no reordering was used.
    pub n_colors: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SkPerfConfig {
    pub n_multipliers: u32,
    pub ext_bandwidth_gbps: f64,
    pub n_internal_ports: u32,
    pub fp_add_latency_cycles: u32,
    pub fp_mul_latency_cycles: u32,
    pub clock_mhz: f64,
    pub value_width_bytes: u32,
    pub setup_cycles: u32,
    pub write_overhead_cycles: u32,
    pub ilu0_unit_delay_cycles: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SkPerfSummary {
    pub total_cycles: u64,
    pub spmv_cycles: u64,
    pub ilu0_cycles: u64,
    pub vector_op_cycles: u64,
    pub wall_time_ms: f64,
    pub gflops: f64,
}

impl From<SkPerfConfig> for PerfConfig {
    fn from(c: SkPerfConfig) -> Self {
        Self {
            n_multipliers: c.n_multipliers,
            ext_bandwidth_gbps: c.ext_bandwidth_gbps,
            n_internal_ports: c.n_internal_ports,
            fp_add_latency_cycles: c.fp_add_latency_cycles,
            fp_mul_latency_cycles: c.fp_mul_latency_cycles,
            clock_mhz: c.clock_mhz,
            value_width_bytes: c.value_width_bytes,
            setup_cycles: c.setup_cycles,
            write_overhead_cycles: c.write_overhead_cycles,
            ilu0_unit_delay_cycles: c.ilu0_unit_delay_cycles,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(SkStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => SkStatus::ParseError,
            Error::Csro(_) | Error::Io(_) => SkStatus::IoError,
            Error::Matrix(_) | Error::Reorder(_) => SkStatus::MatrixError,
            Error::Precond(_) => SkStatus::PrecondError,
            Error::Solver(SolverError::Breakdown { .. }) => SkStatus::Breakdown,
            Error::Solver(SolverError::Precond(_)) => SkStatus::PrecondError,
            Error::Solver(SolverError::Matrix(_)) => SkStatus::MatrixError,
            Error::Solver(SolverError::InvalidConfig(_)) | Error::Invalid(_) => SkStatus::InvalidArgument,
            Error::Model(_) => SkStatus::ModelError,
        };
        Self(status, e.to_string())
    }
}

macro_rules! failure_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
failure_from!(
    solver_kit::error::MatrixError,
    solver_kit::error::CsroIoError,
    solver_kit::error::SolverError,
    solver_kit::error::ModelError,
    std::io::Error
);

fn null(what: &str) -> Failure {
    Failure(SkStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SkStatus::InvalidArgument, msg.into())
}

/// Runs `f`, records any failure or panic, and returns the status.
fn guard(f: impl FnOnce() -> Result<SkStatus, Failure>) -> SkStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SkStatus::Panic
        }
    }
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path).to_str().map_err(|_| invalid("path is not valid UTF-8"))?;
    Ok(PathBuf::from(s))
}

unsafe fn matrix_arg<'a>(m: *const SkMatrix) -> Result<&'a CsrMatrix, Failure> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null("matrix"))
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut_arg<'a, T>(ptr: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn store_matrix(out: *mut *mut SkMatrix, m: CsrMatrix) -> Result<SkStatus, Failure> {
    *out = Box::into_raw(Box::new(SkMatrix { inner: m }));
    Ok(SkStatus::Ok)
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next `sk_` call on the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated library version.
#[no_mangle]
pub extern "C" fn sk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_from_matrix_market(path: *const c_char, out: *mut *mut SkMatrix) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = read_matrix_market(&path_arg(path)?)?;
        store_matrix(out, m)
    })
}

/// Loads a Matrix Market or CSRO file, detected from its content.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_load(path: *const c_char, out: *mut *mut SkMatrix) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = load_matrix(&path_arg(path)?)?;
        store_matrix(out, m)
    })
}

/// Copies canonical CSR arrays into a new matrix. `row_pointers` holds
/// `n_rows + 1` entries; `col_indices` and `values` hold `nnz`.
///
/// # Safety
/// Each pointer must reference at least the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_from_csr(
    n_rows: usize,
    n_cols: usize,
    row_pointers: *const usize,
    col_indices: *const usize,
    values: *const f64,
    nnz: usize,
    out: *mut *mut SkMatrix,
) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rp_len = n_rows.checked_add(1).ok_or_else(|| invalid("n_rows is too large"))?;
        let rp = slice_arg(row_pointers, rp_len, "row_pointers")?.to_vec();
        let ci = slice_arg(col_indices, nnz, "col_indices")?.to_vec();
        let v = slice_arg(values, nnz, "values")?.to_vec();
        let m = CsrMatrix::new(n_rows, n_cols, rp, ci, v)?;
        store_matrix(out, m)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_read_csro(path: *const c_char, out: *mut *mut SkMatrix) -> SkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let file = std::fs::File::open(path_arg(path)?)?;
        let csro = CsroMatrix::read_from(std::io::BufReader::new(file))?;
        store_matrix(out, csro_to_csr(&csro)?)
    })
}

/// # Safety
/// `m` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_write_csro(m: *const SkMatrix, path: *const c_char) -> SkStatus {
    guard(|| {
        let m = matrix_arg(m)?;
        let bytes = csr_to_csro(m).to_bytes()?;
        std::fs::write(path_arg(path)?, bytes)?;
        Ok(SkStatus::Ok)
    })
}

/// Any of the output pointers may be NULL.
///
/// # Safety
/// `m` must be a live handle; non-NULL outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_dims(
    m: *const SkMatrix,
    n_rows: *mut usize,
    n_cols: *mut usize,
    nnz: *mut usize,
) -> SkStatus {
    guard(|| {
        let m = matrix_arg(m)?;
        for (p, v) in [(n_rows, m.n_rows()), (n_cols, m.n_cols()), (nnz, m.nnz())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(SkStatus::Ok)
    })
}

/// Frees a handle. NULL is ignored.
///
/// # Safety
/// `m` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_free(m: *mut SkMatrix) {
    if !m.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(m))));
    }
}

/// `y = A x`
///
/// # Safety
/// `x` and `y` must reference `x_len` and `y_len` elements.
#[no_mangle]
pub unsafe extern "C" fn sk_spmv(m: *const SkMatrix, x: *const f64, x_len: usize, y: *mut f64, y_len: usize) -> SkStatus {
    guard(|| {
        let m = matrix_arg(m)?;
        let x = slice_arg(x, x_len, "x")?;
        let y = slice_mut_arg(y, y_len, "y")?;
        m.spmv_into(x, y)?;
        Ok(SkStatus::Ok)
    })
}

#[no_mangle]
pub extern "C" fn sk_solver_config_default() -> SkSolverConfig {
    SkSolverConfig { max_iterations: 1000, reduction: 1e-2, precond: SkPrecond::None, reorder: SkReorder::None, seed: 0 }
}

fn solver_config(c: &SkSolverConfig) -> SolverConfig {
    SolverConfig {
        max_iterations: usize::try_from(c.max_iterations).unwrap_or(usize::MAX),
        exit: ExitCondition::Relative { reduction: c.reduction },
        preconditioner: match c.precond {
            SkPrecond::None => PrecondKind::None,
            SkPrecond::Jacobi => PrecondKind::Jacobi,
            SkPrecond::Ilu0 => PrecondKind::Ilu0,
        },
        reorder: reorder_kind(c.reorder, c.seed),
    }
}

fn reorder_kind(r: SkReorder, seed: u64) -> ReorderKind {
    match r {
        SkReorder::None => ReorderKind::None,
        SkReorder::LevelScheduling => ReorderKind::LevelScheduling,
        SkReorder::GraphColoring => ReorderKind::GraphColoring { seed, max_rows_per_color: None },
    }
}

/// Solves `A x = b`. `x0` may be NULL for a zero start. On success or
/// `NotConverged`, `x` holds the last iterate and `summary` (if non-NULL)
/// is filled in.
///
/// # Safety
/// `b`, `x` and a non-NULL `x0` must reference `n` elements.
#[no_mangle]
pub unsafe extern "C" fn sk_solve(
    m: *const SkMatrix,
    b: *const f64,
    x0: *const f64,
    x: *mut f64,
    n: usize,
    config: *const SkSolverConfig,
    summary: *mut SkSolveSummary,
) -> SkStatus {
    guard(|| {
        let m = matrix_arg(m)?;
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let b = slice_arg(b, n, "b")?;
        let start = if x0.is_null() { vec![0.0; n] } else { slice_arg(x0, n, "x0")?.to_vec() };
        let x = slice_mut_arg(x, n, "x")?;
        let res = bicgstab(m, b, &start, &solver_config(cfg))?;
        x.copy_from_slice(&res.x);
        if let Some(s) = summary.as_mut() {
            *s = SkSolveSummary {
                converged: res.converged,
                iterations: res.iterations,
                initial_residual_norm: res.initial_residual_norm,
                final_residual_norm: res.final_residual_norm,
                setup_time_ms: res.setup_time_ms,
                wall_time_ms: res.wall_time_ms,
                n_colors: res.n_colors.unwrap_or(0) as u64,
            };
        }
        if res.converged {
            Ok(SkStatus::Ok)
        } else {
            set_error("iteration limit reached before convergence");
            Ok(SkStatus::NotConverged)
        }
    })
}

#[no_mangle]
pub extern "C" fn sk_perf_config_default() -> SkPerfConfig {
    let d = PerfConfig::default();
    SkPerfConfig {
        n_multipliers: d.n_multipliers,
        ext_bandwidth_gbps: d.ext_bandwidth_gbps,
        n_internal_ports: d.n_internal_ports,
        fp_add_latency_cycles: d.fp_add_latency_cycles,
        fp_mul_latency_cycles: d.fp_mul_latency_cycles,
        clock_mhz: d.clock_mhz,
        value_width_bytes: d.value_width_bytes,
        setup_cycles: d.setup_cycles,
        write_overhead_cycles: d.write_overhead_cycles,
        ilu0_unit_delay_cycles: d.ilu0_unit_delay_cycles,
    }
}

/// Models an ILU0-BiCGStab run of `iterations` on `m` after reordering.
/// With `SkReorder::None` the matrix is a single color.
///
/// # Safety
/// `m` must be a live handle; `config` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sk_model_solver(
    m: *const SkMatrix,
    reorder: SkReorder,
    seed: u64,
    config: *const SkPerfConfig,
    iterations: f64,
    out: *mut SkPerfSummary,
) -> SkStatus {
    guard(|| {
        let m = matrix_arg(m)?;
        let cfg: PerfConfig = (*config.as_ref().ok_or_else(|| null("config"))?).into();
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let plan = reorder_kind(reorder, seed).plan(m)?.unwrap_or_else(|| ReorderPlan::identity(m.n_rows()));
        let (meta, factors) = solver_metas(m, &plan)?;
        let e = model_solver(&meta, &factors, &cfg, iterations)?;
        *out = SkPerfSummary {
            total_cycles: e.total_cycles,
            spmv_cycles: e.spmv_cycles,
            ilu0_cycles: e.ilu0_cycles,
            vector_op_cycles: e.vector_op_cycles,
            wall_time_ms: e.wall_time_ms,
            gflops: e.gflops,
        };
        Ok(SkStatus::Ok)
    })
}
