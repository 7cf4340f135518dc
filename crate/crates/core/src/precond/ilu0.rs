use crate::error::{MatrixError, PrecondError};
use crate::matrix::CsrMatrix;
use crate::reorder::ReorderPlan;
use crate::sparstition::{build_partitions, gather_into, PartitionSet};

/// Pivots smaller than this in magnitude are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-300;

/// ILU0 factors split into the three arrays the substitution kernels stream:
/// the strict lower part `L` (unit diagonal implied), the strict upper part
/// with its rows stored last row first, and the diagonal of `U`, also
/// reversed.
#[derive(Debug, Clone, PartialEq)]
pub struct IluFactors {
    n: usize,
    l: CsrMatrix,
    u_reversed: CsrMatrix,
    diag_reversed: Vec<f64>,
}

fn require_square(a: &CsrMatrix) -> Result<(), PrecondError> {
    if a.is_square() {
        Ok(())
    } else {
        Err(MatrixError::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() }.into())
    }
}

fn diagonal_positions(a: &CsrMatrix) -> Result<Vec<usize>, PrecondError> {
    (0..a.n_rows())
        .map(|row| a.diagonal_index(row).ok_or(PrecondError::MissingDiagonal { row }))
        .collect()
}

/// Zero fill-in incomplete LU, IKJ row-wise variant. The combined factor is
/// returned in the pattern of `a`: strictly lower entries hold `L`, the rest
/// holds `U`.
pub fn ilu0_decompose(a: &CsrMatrix) -> Result<CsrMatrix, PrecondError> {
    require_square(a)?;
    let n = a.n_rows();
    let diag = diagonal_positions(a)?;
    let rp = a.row_pointers();
    let cols = a.col_indices();
    let mut values = a.values().to_vec();
    let mut marker = vec![usize::MAX; n];

    for i in 0..n {
        for v in rp[i]..rp[i + 1] {
            marker[cols[v]] = v;
        }
        for v in rp[i]..diag[i] {
            let k = cols[v];
            let factor = values[v] / values[diag[k]];
            values[v] = factor;
            for w in diag[k] + 1..rp[k + 1] {
                let target = marker[cols[w]];
                if target != usize::MAX {
                    values[target] -= factor * values[w];
                }
            }
        }
        for v in rp[i]..rp[i + 1] {
            marker[cols[v]] = usize::MAX;
        }
        if values[diag[i]].abs() < PIVOT_TOLERANCE || !values[diag[i]].is_finite() {
            return Err(PrecondError::ZeroPivot { row: i });
        }
    }
    Ok(CsrMatrix::new(n, n, rp.to_vec(), cols.to_vec(), values).expect("pattern unchanged"))
}

/// Splits a combined LU matrix into lower, reversed upper and reversed
/// diagonal parts. Lossless: [`IluFactors::reassemble`] restores `lu`.
pub fn split_lu(lu: &CsrMatrix) -> Result<IluFactors, PrecondError> {
    require_square(lu)?;
    let n = lu.n_rows();
    let diag = diagonal_positions(lu)?;
    let rp = lu.row_pointers();
    let cols = lu.col_indices();
    let vals = lu.values();

    let mut l_ptr = Vec::with_capacity(n + 1);
    l_ptr.push(0);
    let mut l_cols = Vec::new();
    let mut l_vals = Vec::new();
    for i in 0..n {
        l_cols.extend_from_slice(&cols[rp[i]..diag[i]]);
        l_vals.extend_from_slice(&vals[rp[i]..diag[i]]);
        l_ptr.push(l_cols.len());
    }

    let mut u_ptr = Vec::with_capacity(n + 1);
    u_ptr.push(0);
    let mut u_cols = Vec::new();
    let mut u_vals = Vec::new();
    let mut diag_reversed = Vec::with_capacity(n);
    for i in (0..n).rev() {
        u_cols.extend_from_slice(&cols[diag[i] + 1..rp[i + 1]]);
        u_vals.extend_from_slice(&vals[diag[i] + 1..rp[i + 1]]);
        u_ptr.push(u_cols.len());
        diag_reversed.push(vals[diag[i]]);
    }

    Ok(IluFactors {
        n,
        l: CsrMatrix::new(n, n, l_ptr, l_cols, l_vals)?,
        u_reversed: CsrMatrix::new(n, n, u_ptr, u_cols, u_vals)?,
        diag_reversed,
    })
}

impl IluFactors {
    /// Decomposes and splits in one step.
    pub fn factor(a: &CsrMatrix) -> Result<Self, PrecondError> {
        split_lu(&ilu0_decompose(a)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> &CsrMatrix {
        &self.l
    }

    pub fn upper_reversed(&self) -> &CsrMatrix {
        &self.u_reversed
    }

    pub fn diag_reversed(&self) -> &[f64] {
        &self.diag_reversed
    }

    /// Strict upper part in natural row order.
    pub fn upper(&self) -> CsrMatrix {
        let n = self.n;
        let triplets = self
            .u_reversed
            .triplets()
            .map(|(r, c, v)| (n - 1 - r, c, v));
        CsrMatrix::from_triplets(n, n, triplets).expect("valid upper factor")
    }

    /// Recombines the three parts into the single LU matrix.
    pub fn reassemble(&self) -> CsrMatrix {
        let n = self.n;
        let lower = self.l.triplets();
        let upper = self.u_reversed.triplets().map(|(r, c, v)| (n - 1 - r, c, v));
        let diag = self.diag_reversed.iter().enumerate().map(|(r, &v)| (n - 1 - r, n - 1 - r, v));
        CsrMatrix::from_triplets(n, n, lower.chain(upper).chain(diag)).expect("valid factors")
    }

    /// Solves `L U p = x` with a forward then a backward substitution.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, PrecondError> {
        let mut p = vec![0.0; self.n];
        self.apply_into(x, &mut p)?;
        Ok(p)
    }

    pub fn apply_into(&self, x: &[f64], p: &mut [f64]) -> Result<(), PrecondError> {
        self.check_len(x.len())?;
        self.check_len(p.len())?;
        let n = self.n;
        for i in 0..n {
            let (cols, vals) = self.l.row(i);
            let mut acc = x[i];
            for (&k, &l) in cols.iter().zip(vals) {
                acc -= l * p[k];
            }
            p[i] = acc;
        }
        for r in 0..n {
            let i = n - 1 - r;
            let (cols, vals) = self.u_reversed.row(r);
            let mut acc = p[i];
            // walk each row right to left like the reference backward sweep
            for (&j, &u) in cols.iter().zip(vals).rev() {
                acc -= u * p[j];
            }
            p[i] = acc / self.diag_reversed[r];
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<(), PrecondError> {
        if len == self.n {
            Ok(())
        } else {
            Err(MatrixError::DimensionMismatch { expected: self.n, found: len }.into())
        }
    }
}

/// Vector partitions for the two substitution sweeps. The forward sweep
/// reads `L`, the backward sweep reads the strict upper part, so each gets
/// its own index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IluPartitions {
    pub lower: PartitionSet,
    pub upper: PartitionSet,
}

impl IluPartitions {
    pub fn build(factors: &IluFactors, plan: &ReorderPlan) -> Result<Self, PrecondError> {
        if plan.len() != factors.n {
            return Err(PrecondError::PlanMismatch { plan: plan.len(), factors: factors.n });
        }
        let lower = build_partitions(&factors.l, plan).expect("sizes checked");
        let upper = build_partitions(&factors.upper(), plan).expect("sizes checked");
        Ok(Self { lower, upper })
    }
}

/// Color-by-color substitution. Colors are swept in order for `L` and in
/// reverse for `U`; each color first gathers the vector values it needs,
/// which already include every earlier color's results. Given factors of a
/// matrix permuted by `plan`, the result equals [`IluFactors::apply`] bit for
/// bit.
pub fn ilu0_apply_colored(
    factors: &IluFactors,
    plan: &ReorderPlan,
    parts: &IluPartitions,
    x: &[f64],
) -> Result<Vec<f64>, PrecondError> {
    let mut p = vec![0.0; factors.n];
    let mut buf = Vec::new();
    ilu0_apply_colored_into(factors, plan, parts, x, &mut p, &mut buf)?;
    Ok(p)
}

pub(crate) fn ilu0_apply_colored_into(
    factors: &IluFactors,
    plan: &ReorderPlan,
    parts: &IluPartitions,
    x: &[f64],
    p: &mut [f64],
    buf: &mut Vec<f64>,
) -> Result<(), PrecondError> {
    let n = factors.n;
    factors.check_len(x.len())?;
    factors.check_len(p.len())?;
    if plan.len() != n || parts.lower.n_colors() != plan.n_colors() || parts.upper.n_colors() != plan.n_colors() {
        return Err(PrecondError::PlanMismatch { plan: plan.len(), factors: n });
    }

    for c in 0..plan.n_colors() {
        let indices = parts.lower.indices(c);
        gather_into(p, indices, buf);
        for i in plan.color_rows(c) {
            let (cols, vals) = factors.l.row(i);
            let mut acc = x[i];
            for (&k, &l) in cols.iter().zip(vals) {
                acc -= l * buf[local_index(indices, k)];
            }
            p[i] = acc;
        }
    }
    for c in (0..plan.n_colors()).rev() {
        let indices = parts.upper.indices(c);
        gather_into(p, indices, buf);
        for i in plan.color_rows(c) {
            let r = n - 1 - i;
            let (cols, vals) = factors.u_reversed.row(r);
            let mut acc = p[i];
            for (&j, &u) in cols.iter().zip(vals).rev() {
                acc -= u * buf[local_index(indices, j)];
            }
            p[i] = acc / factors.diag_reversed[r];
        }
    }
    Ok(())
}

fn local_index(indices: &[usize], col: usize) -> usize {
    indices.binary_search(&col).expect("column is part of the color's partition")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_dense() {
        let a = CsrMatrix::from_dense(2, 2, &[4.0, 2.0, 1.0, 3.0]).unwrap();
        let lu = ilu0_decompose(&a).unwrap();
        assert_eq!(lu.values(), &[4.0, 2.0, 0.25, 2.5]);
        let f = split_lu(&lu).unwrap();
        assert_eq!(f.diag_reversed(), &[2.5, 4.0]);
        assert_eq!(f.lower().values(), &[0.25]);
        assert_eq!(f.upper_reversed().row(1), (&[1usize][..], &[2.0][..]));
        assert_eq!(f.reassemble(), lu);
    }

    #[test]
    fn triangular_input_unchanged() {
        let lower = CsrMatrix::from_dense(3, 3, &[2.0, 0.0, 0.0, 1.0, 3.0, 0.0, -1.0, 4.0, 5.0]).unwrap();
        // a lower-triangular A factors as L = A D^-1 (unit) and U = D, so the
        // combined storage differs; the upper-triangular case is the identity map
        let upper = lower.transpose();
        assert_eq!(ilu0_decompose(&upper).unwrap(), upper);
        let lu = ilu0_decompose(&lower).unwrap();
        assert_eq!(lu.get(1, 0), Some(0.5));
        assert_eq!(lu.get(2, 1), Some(4.0 / 3.0));
    }

    #[test]
    fn diagonal_split() {
        let a = CsrMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let f = IluFactors::factor(&a).unwrap();
        assert_eq!(f.lower().nnz(), 0);
        assert_eq!(f.upper_reversed().nnz(), 0);
        assert_eq!(f.diag_reversed(), &[3.0, 2.0, 1.0]);
        assert_eq!(f.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn identity_apply() {
        let f = IluFactors::factor(&CsrMatrix::identity(4)).unwrap();
        let x = [1.0, -2.0, 3.5, 0.0];
        assert_eq!(f.apply(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn missing_diagonal_and_zero_pivot() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(ilu0_decompose(&a).unwrap_err(), PrecondError::MissingDiagonal { row: 1 });
        // second pivot becomes 1 - 1*1 = 0
        let b = CsrMatrix::from_dense(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(ilu0_decompose(&b).unwrap_err(), PrecondError::ZeroPivot { row: 1 });
        let c = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 0.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(ilu0_decompose(&c).unwrap_err(), PrecondError::ZeroPivot { row: 0 });
        assert!(matches!(split_lu(&a), Err(PrecondError::MissingDiagonal { row: 1 })));
    }

    #[test]
    fn apply_dimension_mismatch() {
        let f = IluFactors::factor(&CsrMatrix::identity(3)).unwrap();
        assert!(matches!(f.apply(&[1.0]), Err(PrecondError::Matrix(MatrixError::DimensionMismatch { .. }))));
    }

    #[test]
    fn colored_matches_on_diagonal() {
        let a = CsrMatrix::from_diagonal(&[2.0, 4.0, 8.0]);
        let f = IluFactors::factor(&a).unwrap();
        let plan = ReorderPlan::identity(3);
        let parts = IluPartitions::build(&f, &plan).unwrap();
        let x = [1.0, 1.0, 1.0];
        assert_eq!(ilu0_apply_colored(&f, &plan, &parts, &x).unwrap(), f.apply(&x).unwrap());
    }
}
