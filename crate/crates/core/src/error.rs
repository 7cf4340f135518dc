use thiserror::Error;

/// Structural problems with a sparse matrix or a vector passed against it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("row pointer array has length {found}, expected {expected}")]
    RowPointerLength { expected: usize, found: usize },
    #[error("row pointers must start at 0, end at {nnz} and never decrease (violation at row {row})")]
    RowPointerOrder { row: usize, nnz: usize },
    #[error("values ({values}) and column indices ({cols}) differ in length")]
    ArrayLength { values: usize, cols: usize },
    #[error("column index {col} in row {row} is out of bounds for {n_cols} columns")]
    ColumnOutOfBounds { row: usize, col: usize, n_cols: usize },
    #[error("column indices in row {row} are not strictly increasing")]
    UnsortedRow { row: usize },
    #[error("entry ({row}, {col}) lies outside a {n_rows}x{n_cols} matrix")]
    EntryOutOfBounds { row: usize, col: usize, n_rows: usize, n_cols: usize },
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must be square, found {n_rows}x{n_cols}")]
    NotSquare { n_rows: usize, n_cols: usize },
    #[error("row offsets imply at least {implied} rows but the matrix has {n_rows}")]
    OffsetOverflow { implied: usize, n_rows: usize },
    #[error("the first row offset must be at least 1 when the matrix has values")]
    LeadingZeroOffset,
    #[error("block size must be at least 1")]
    ZeroBlockSize,
    #[error("{what} value {value} does not fit in 32 bits")]
    IndexTooWide { what: &'static str, value: usize },
}

/// Matrix Market parse failures. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: unsupported storage format '{format}', only 'coordinate' is accepted")]
    UnsupportedFormat { line: usize, format: String },
    #[error("line {line}: unsupported field type '{field}'")]
    UnsupportedField { line: usize, field: String },
    #[error("line {line}: unsupported symmetry '{symmetry}'")]
    UnsupportedSymmetry { line: usize, symmetry: String },
    #[error("line {line}: malformed size line")]
    MalformedSize { line: usize },
    #[error("line {line}: malformed entry")]
    MalformedEntry { line: usize },
    #[error("line {line}: index ({row}, {col}) out of declared bounds {n_rows}x{n_cols}")]
    IndexOutOfBounds { line: usize, row: usize, col: usize, n_rows: usize, n_cols: usize },
    #[error("declared {declared} entries but found {found}")]
    EntryCount { declared: usize, found: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

/// CSRO binary container failures.
#[derive(Debug, Error)]
pub enum CsroIoError {
    #[error("not a CSRO file (bad magic)")]
    BadMagic,
    #[error("unsupported CSRO format version {0}")]
    UnsupportedVersion(u32),
    #[error("CSRO file truncated")]
    Truncated,
    #[error("{0} trailing bytes after CSRO payload")]
    TrailingBytes(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReorderError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("plan covers {plan} rows but the matrix has {matrix}")]
    PlanMismatch { plan: usize, matrix: usize },
    #[error("index {index} out of bounds for vector of length {len}")]
    IndexOutOfBounds { index: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrecondError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("row {row} has no diagonal entry")]
    MissingDiagonal { row: usize },
    #[error("zero pivot in row {row}")]
    ZeroPivot { row: usize },
    #[error("plan covers {plan} rows but the factors have {factors}")]
    PlanMismatch { plan: usize, factors: usize },
}

/// Which scalar of the BiCGStab recurrence vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakdownKind {
    /// `dot(rt, r)` vanished.
    Rho,
    /// `dot(rt, v)` vanished.
    RtV,
    /// `dot(t, t)` vanished.
    TT,
    /// `omega` vanished, so the next `beta` is undefined.
    Omega,
    /// The residual norm stopped being finite.
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("preconditioner setup failed: {0}")]
    Precond(#[from] PrecondError),
    #[error("BiCGStab breakdown ({kind:?}) after {iterations} iterations")]
    Breakdown { kind: BreakdownKind, iterations: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("design-space grid is empty")]
    EmptyGrid,
    #[error("invalid performance configuration: {0}")]
    InvalidConfig(String),
}

/// Umbrella error used by the command-line front end and the C ABI.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Csro(#[from] CsroIoError),
    #[error(transparent)]
    Reorder(#[from] ReorderError),
    #[error(transparent)]
    Precond(#[from] PrecondError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}
