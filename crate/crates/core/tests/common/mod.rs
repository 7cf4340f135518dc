//! Helpers shared by the integration tests. Oracles here are written
//! independently of the library code they check.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use solver_kit::reorder::ReorderPlan;
use solver_kit::CsrMatrix;

/// Directory holding SuiteSparse matrices as `<name>.mtx` or
/// `<name>/<name>.mtx`.
pub const MATRIX_DIR_ENV: &str = "SOLVER_KIT_MATRIX_DIR";

pub fn matrix_dir() -> PathBuf {
    std::env::var_os(MATRIX_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/suitesparse"))
}

pub fn find_matrix(name: &str) -> Option<PathBuf> {
    let dir = matrix_dir();
    [dir.join(format!("{name}.mtx")), dir.join(name).join(format!("{name}.mtx"))].into_iter().find(|p| p.is_file())
}

pub fn load_named(name: &str) -> Result<CsrMatrix, String> {
    let path = find_matrix(name).ok_or_else(|| format!("{name}.mtx not found under {}", matrix_dir().display()))?;
    solver_kit::matrix::read_matrix_market(&path).map_err(|e| format!("{}: {e}", path.display()))
}

/// About `density · rows · cols` entries at uniformly drawn positions,
/// values in `[-1, 1)`. Collisions merge, so the result stays canonical.
pub fn random_csr(rng: &mut impl Rng, n_rows: usize, n_cols: usize, density: f64) -> CsrMatrix {
    let target = (density * (n_rows * n_cols) as f64).round() as usize;
    let mut trip = Vec::with_capacity(target);
    if n_rows > 0 && n_cols > 0 {
        for _ in 0..target {
            trip.push((rng.gen_range(0..n_rows), rng.gen_range(0..n_cols), rng.gen_range(-1.0..1.0)));
        }
    }
    CsrMatrix::from_triplets(n_rows, n_cols, trip).unwrap()
}

/// Row-major dense copy built straight from the triplets.
pub fn dense(a: &CsrMatrix) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; a.n_cols()]; a.n_rows()];
    for (i, j, v) in a.triplets() {
        d[i][j] += v;
    }
    d
}

pub fn dense_matvec(d: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    d.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Strictly diagonally dominant; `lower`/`upper` select which off-diagonal
/// triangles may hold entries.
pub fn dominant(rng: &mut impl Rng, n: usize, density: f64, lower: bool, upper: bool) -> CsrMatrix {
    let mut trip = Vec::new();
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            let allowed = (j < i && lower) || (j > i && upper);
            if allowed && rng.gen_bool(density) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                off += v.abs();
                trip.push((i, j, v));
            }
        }
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        trip.push((i, i, sign * (off + rng.gen_range(0.5..2.0))));
    }
    CsrMatrix::from_triplets(n, n, trip).unwrap()
}

/// Checks that `plan` is a bijection whose colors tile `0..n` in order.
pub fn check_plan_shape(plan: &ReorderPlan, n: usize) -> Result<(), String> {
    let perm = plan.permutation();
    let inv = plan.inverse_permutation();
    if perm.len() != n || inv.len() != n {
        return Err(format!("permutation length {} for {n} rows", perm.len()));
    }
    let mut seen = vec![false; n];
    for (old, &new) in perm.iter().enumerate() {
        if new >= n || seen[new] {
            return Err(format!("row {old} maps to invalid or repeated {new}"));
        }
        seen[new] = true;
        if inv[new] != old {
            return Err(format!("inverse disagrees at {new}"));
        }
    }
    let offs = plan.color_offsets();
    if offs.first() != Some(&0) || offs.last() != Some(&n) || offs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("bad color offsets {offs:?}"));
    }
    Ok(())
}

/// No two rows of one color are coupled by an entry in either direction.
pub fn check_independent_colors(a: &CsrMatrix, plan: &ReorderPlan) -> Result<(), String> {
    let d = dense(a);
    let inv = plan.inverse_permutation();
    for c in 0..plan.n_colors() {
        let rows: Vec<usize> = plan.color_rows(c).map(|r| inv[r]).collect();
        for &i in &rows {
            for &k in &rows {
                if i != k && (d[i][k] != 0.0 || a.get(i, k).is_some()) {
                    return Err(format!("rows {i} and {k} share color {c} but are coupled"));
                }
            }
        }
    }
    Ok(())
}

/// Every off-diagonal entry keeps its side of the diagonal, so each row
/// still comes after the rows it depends on.
pub fn check_order_preserved(a: &CsrMatrix, plan: &ReorderPlan) -> Result<(), String> {
    let perm = plan.permutation();
    for (i, j, _) in a.triplets() {
        if i != j && (j < i) != (perm[j] < perm[i]) {
            return Err(format!("entry ({i}, {j}) changed sides: rows now {} and {}", perm[i], perm[j]));
        }
    }
    Ok(())
}
