//! Matrix Market coordinate reader and a canonical text writer.

use std::fmt::Write as _;
use std::io::BufRead;

use super::CsrMatrix;
use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

/// Parses a Matrix Market `coordinate` file with a `real` or `integer` field
/// and `general` or `symmetric` symmetry. Symmetric files are expanded to full
/// storage, duplicates are summed and indices become 0-based.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CsrMatrix, ParseError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line_no, header) = match lines.next() {
        Some((n, l)) => (n, l.map_err(|e| ParseError::Io(e.to_string()))?),
        None => return Err(ParseError::MalformedHeader { line: 1, reason: "empty input".into() }),
    };
    let symmetry = parse_header(line_no, &header)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut found = 0usize;
    for (line, text) in lines {
        let text = text.map_err(|e| ParseError::Io(e.to_string()))?;
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let Some((n_rows, n_cols, declared)) = size else {
            size = Some(parse_size(line, trimmed)?);
            triplets.reserve(size.map_or(0, |s| s.2) * if symmetry == Symmetry::Symmetric { 2 } else { 1 });
            continue;
        };
        let mut fields = trimmed.split_whitespace();
        let row: usize = next_field(&mut fields, line)?;
        let col: usize = next_field(&mut fields, line)?;
        let value: f64 = next_field(&mut fields, line)?;
        if fields.next().is_some() {
            return Err(ParseError::MalformedEntry { line });
        }
        if row == 0 || col == 0 || row > n_rows || col > n_cols {
            return Err(ParseError::IndexOutOfBounds { line, row, col, n_rows, n_cols });
        }
        found += 1;
        if found > declared {
            return Err(ParseError::EntryCount { declared, found });
        }
        let (r, c) = (row - 1, col - 1);
        triplets.push((r, c, value));
        if symmetry == Symmetry::Symmetric && r != c {
            triplets.push((c, r, value));
        }
    }

    let (n_rows, n_cols, declared) = size.ok_or(ParseError::MalformedSize { line: line_no + 1 })?;
    if found != declared {
        return Err(ParseError::EntryCount { declared, found });
    }
    Ok(CsrMatrix::from_triplets(n_rows, n_cols, triplets).expect("indices were bounds-checked"))
}

pub fn parse_matrix_market_str(text: &str) -> Result<CsrMatrix, ParseError> {
    parse_matrix_market(text.as_bytes())
}

fn parse_header(line: usize, header: &str) -> Result<Symmetry, ParseError> {
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    let malformed = |reason: &str| ParseError::MalformedHeader { line, reason: reason.to_string() };
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(malformed("missing %%MatrixMarket banner"));
    }
    if tokens.len() != 5 {
        return Err(malformed("expected 'matrix <format> <field> <symmetry>'"));
    }
    if tokens[1] != "matrix" {
        return Err(malformed("object must be 'matrix'"));
    }
    if tokens[2] != "coordinate" {
        return Err(ParseError::UnsupportedFormat { line, format: tokens[2].clone() });
    }
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err(ParseError::UnsupportedField { line, field: other.to_string() }),
    }
    match tokens[4].as_str() {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        other => Err(ParseError::UnsupportedSymmetry { line, symmetry: other.to_string() }),
    }
}

fn parse_size(line: usize, text: &str) -> Result<(usize, usize, usize), ParseError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(ParseError::MalformedSize { line });
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| ParseError::MalformedSize { line });
    Ok((parse(parts[0])?, parse(parts[1])?, parse(parts[2])?))
}

fn next_field<'a, T: std::str::FromStr>(
    fields: &mut impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<T, ParseError> {
    fields
        .next()
        .and_then(|f| f.parse().ok())
        .ok_or(ParseError::MalformedEntry { line })
}

/// Canonical text dump: `coordinate real general`, entries in row-major
/// storage order, values in shortest round-trip form. Parsing the output
/// reproduces the matrix exactly.
pub fn write_matrix_market(a: &CsrMatrix) -> String {
    let mut out = String::with_capacity(64 + a.nnz() * 24);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz());
    for (r, c, v) in a.triplets() {
        let _ = writeln!(out, "{} {} {:?}", r + 1, c + 1, v);
    }
    out
}
