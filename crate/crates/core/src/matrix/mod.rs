//! Sparse storage formats: canonical CSR, block CSR, CSRO, and Matrix Market I/O.

mod bsr;
mod csr;
mod csro;
mod market;

pub use bsr::{unblock_bsr, BsrMatrix};
pub use csr::CsrMatrix;
pub use csro::{csr_to_csro, csro_to_csr, CsroMatrix, CSRO_MAGIC, CSRO_VERSION};
pub use market::{parse_matrix_market, parse_matrix_market_str, write_matrix_market};

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::error::Error;

/// Loads a matrix from disk, dispatching on content: CSRO containers are
/// recognised by their magic bytes, anything else is read as Matrix Market.
pub fn load_matrix(path: &Path) -> Result<CsrMatrix, Error> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(CSRO_MAGIC) {
        let csro = CsroMatrix::from_bytes(&bytes)?;
        return Ok(csro_to_csr(&csro)?);
    }
    Ok(parse_matrix_market(bytes.as_slice())?)
}

/// Reads a Matrix Market file from disk.
pub fn read_matrix_market(path: &Path) -> Result<CsrMatrix, Error> {
    let file = File::open(path)?;
    Ok(parse_matrix_market(BufReader::new(file))?)
}
