//! Symmetric row/column reorderings that group mutually independent rows
//! into colors.
//!
//! Two rows are *adjacent* when either of the two off-diagonal positions
//! between them is in the pattern. Every plan produced here guarantees that
//! no two adjacent rows share a color. Level scheduling additionally keeps
//! every adjacent pair in its original relative order, so lower-triangular
//! entries stay lower and upper entries stay upper after permutation.

use rand::RngCore;
use rand_xoshiro::SplitMix64;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{MatrixError, ReorderError};
use crate::matrix::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReorderMethod {
    LevelScheduling,
    GraphColoring,
}

/// A symmetric permutation together with the color boundaries in the
/// permuted row range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReorderPlan {
    method: ReorderMethod,
    seed: Option<u64>,
    /// `permutation[old] = new`
    permutation: Vec<usize>,
    /// `inverse_permutation[new] = old`
    inverse_permutation: Vec<usize>,
    color_offsets: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// original ordering to permuted ordering
    Forward,
    /// permuted ordering back to the original
    Inverse,
}

/// JSON view of a plan for the command line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanSummary {
    pub method: ReorderMethod,
    pub seed: Option<u64>,
    pub n_colors: usize,
    pub color_offsets: Vec<usize>,
    pub permutation: Vec<usize>,
}

impl ReorderPlan {
    /// Builds a plan from a color assignment; rows inside each color keep
    /// ascending original index.
    fn from_colors(method: ReorderMethod, seed: Option<u64>, colors: &[usize], n_colors: usize) -> Self {
        let n = colors.len();
        let mut color_offsets = vec![0usize; n_colors + 1];
        for &c in colors {
            color_offsets[c + 1] += 1;
        }
        for c in 0..n_colors {
            color_offsets[c + 1] += color_offsets[c];
        }
        let mut next = color_offsets.clone();
        let mut permutation = vec![0usize; n];
        let mut inverse_permutation = vec![0usize; n];
        for (old, &c) in colors.iter().enumerate() {
            let new = next[c];
            next[c] += 1;
            permutation[old] = new;
            inverse_permutation[new] = old;
        }
        Self { method, seed, permutation, inverse_permutation, color_offsets }
    }

    /// A plan with a caller-supplied permutation and a single color. Mostly
    /// useful for tests of the permutation machinery.
    pub fn from_permutation(permutation: Vec<usize>) -> Result<Self, ReorderError> {
        let n = permutation.len();
        let mut inverse_permutation = vec![usize::MAX; n];
        for (old, &new) in permutation.iter().enumerate() {
            if new >= n || inverse_permutation[new] != usize::MAX {
                return Err(ReorderError::IndexOutOfBounds { index: new, len: n });
            }
            inverse_permutation[new] = old;
        }
        Ok(Self {
            method: ReorderMethod::GraphColoring,
            seed: None,
            permutation,
            inverse_permutation,
            color_offsets: vec![0, n],
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_permutation((0..n).collect()).expect("identity is a bijection")
    }

    pub fn method(&self) -> ReorderMethod {
        self.method
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn inverse_permutation(&self) -> &[usize] {
        &self.inverse_permutation
    }

    pub fn color_offsets(&self) -> &[usize] {
        &self.color_offsets
    }

    pub fn n_colors(&self) -> usize {
        self.color_offsets.len() - 1
    }

    /// Permuted row range of color `c`.
    pub fn color_rows(&self, c: usize) -> std::ops::Range<usize> {
        self.color_offsets[c]..self.color_offsets[c + 1]
    }

    /// Color of each permuted row.
    pub fn color_of_permuted_rows(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for c in 0..self.n_colors() {
            out[self.color_rows(c)].fill(c);
        }
        out
    }

    pub fn summary(&self) -> PlanSummary {
        PlanSummary {
            method: self.method,
            seed: self.seed,
            n_colors: self.n_colors(),
            color_offsets: self.color_offsets.clone(),
            permutation: self.permutation.clone(),
        }
    }
}

fn require_square(a: &CsrMatrix) -> Result<(), MatrixError> {
    if a.is_square() {
        Ok(())
    } else {
        Err(MatrixError::NotSquare { n_rows: a.n_rows(), n_cols: a.n_cols() })
    }
}

/// Symmetrised off-diagonal adjacency as CSR-like (pointers, neighbours),
/// neighbours sorted ascending.
fn adjacency(a: &CsrMatrix) -> (Vec<usize>, Vec<usize>) {
    let n = a.n_rows();
    let at = a.transpose();
    let mut ptr = Vec::with_capacity(n + 1);
    let mut adj = Vec::with_capacity(2 * a.nnz());
    ptr.push(0);
    for i in 0..n {
        let (ra, _) = a.row(i);
        let (rt, _) = at.row(i);
        // merge two sorted lists, skipping the diagonal and duplicates
        let (mut p, mut q) = (0, 0);
        while p < ra.len() || q < rt.len() {
            let next = match (ra.get(p), rt.get(q)) {
                (Some(&x), Some(&y)) if x == y => {
                    p += 1;
                    q += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    p += 1;
                    x
                }
                (Some(_), Some(&y)) => {
                    q += 1;
                    y
                }
                (Some(&x), None) => {
                    p += 1;
                    x
                }
                (None, Some(&y)) => {
                    q += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            if next != i {
                adj.push(next);
            }
        }
        ptr.push(adj.len());
    }
    (ptr, adj)
}

/// Level scheduling: row `i` goes one level past the deepest adjacent row
/// with a smaller original index. A row whose dependencies all sit in levels
/// `< k` lands in level `k`, and rows within a level keep ascending order.
pub fn level_schedule(a: &CsrMatrix) -> Result<ReorderPlan, ReorderError> {
    require_square(a)?;
    let n = a.n_rows();
    let (ptr, adj) = adjacency(a);
    let mut level = vec![0usize; n];
    let mut n_levels = 0usize;
    for i in 0..n {
        let deepest = adj[ptr[i]..ptr[i + 1]]
            .iter()
            .take_while(|&&j| j < i)
            .map(|&j| level[j] + 1)
            .max()
            .unwrap_or(0);
        level[i] = deepest;
        n_levels = n_levels.max(deepest + 1);
    }
    Ok(ReorderPlan::from_colors(ReorderMethod::LevelScheduling, None, &level, n_levels))
}

/// Jones-Plassmann coloring. Every row draws a random weight from a
/// SplitMix64 stream seeded with `seed`; each round, the uncolored rows whose
/// weight beats all uncolored neighbours (ties go to the lower row index)
/// form the next color. With `max_rows_per_color`, only the first rows in
/// ascending index join and the rest wait for a later round.
pub fn graph_color(
    a: &CsrMatrix,
    seed: u64,
    max_rows_per_color: Option<usize>,
) -> Result<ReorderPlan, ReorderError> {
    require_square(a)?;
    let n = a.n_rows();
    let cap = max_rows_per_color.unwrap_or(usize::MAX).max(1);
    let (ptr, adj) = adjacency(a);
    let mut rng = SplitMix64::seed_from_u64(seed);
    let weight: Vec<u64> = (0..n).map(|_| rng.next_u64()).collect();
    let beats = |i: usize, j: usize| weight[i] > weight[j] || (weight[i] == weight[j] && i < j);

    const UNCOLORED: usize = usize::MAX;
    let mut color = vec![UNCOLORED; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut n_colors = 0usize;
    while !remaining.is_empty() {
        // winners are decided against the state at the start of the round
        let winners: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                adj[ptr[i]..ptr[i + 1]]
                    .iter()
                    .all(|&j| color[j] != UNCOLORED || beats(i, j))
            })
            .collect();
        for &i in winners.iter().take(cap) {
            color[i] = n_colors;
        }
        remaining.retain(|&i| color[i] == UNCOLORED);
        n_colors += 1;
    }
    Ok(ReorderPlan::from_colors(ReorderMethod::GraphColoring, Some(seed), &color, n_colors))
}

/// `P A Pᵀ`: entry `(i, j)` moves to `(perm[i], perm[j])`.
pub fn apply_reorder(a: &CsrMatrix, plan: &ReorderPlan) -> Result<CsrMatrix, ReorderError> {
    require_square(a)?;
    if plan.len() != a.n_rows() {
        return Err(ReorderError::PlanMismatch { plan: plan.len(), matrix: a.n_rows() });
    }
    let n = a.n_rows();
    let mut row_pointers = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    row_pointers.push(0);
    for new_row in 0..n {
        let old_row = plan.inverse_permutation[new_row];
        let (cols, vals) = a.row(old_row);
        scratch.clear();
        scratch.extend(cols.iter().zip(vals).map(|(&c, &v)| (plan.permutation[c], v)));
        scratch.sort_unstable_by_key(|&(c, _)| c);
        for &(c, v) in &scratch {
            col_indices.push(c);
            values.push(v);
        }
        row_pointers.push(values.len());
    }
    Ok(CsrMatrix::new(n, n, row_pointers, col_indices, values)?)
}

/// Moves vector entries into (forward) or out of (inverse) the plan's order.
pub fn apply_reorder_vector(x: &[f64], plan: &ReorderPlan, direction: Direction) -> Result<Vec<f64>, ReorderError> {
    if x.len() != plan.len() {
        return Err(MatrixError::DimensionMismatch { expected: plan.len(), found: x.len() }.into());
    }
    let mut out = vec![0.0; x.len()];
    match direction {
        Direction::Forward => {
            for (old, &new) in plan.permutation.iter().enumerate() {
                out[new] = x[old];
            }
        }
        Direction::Inverse => {
            for (old, &new) in plan.permutation.iter().enumerate() {
                out[old] = x[new];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lower_bidiagonal(n: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(n, n, (0..n).flat_map(|i| {
            let mut v = vec![(i, i, 2.0)];
            if i > 0 {
                v.push((i, i - 1, -1.0));
            }
            v
        }))
        .unwrap()
    }

    #[test]
    fn diagonal_is_one_level() {
        let plan = level_schedule(&CsrMatrix::identity(5)).unwrap();
        assert_eq!(plan.n_colors(), 1);
        assert_eq!(plan.permutation(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn chain_gives_one_row_per_level() {
        let plan = level_schedule(&lower_bidiagonal(6)).unwrap();
        assert_eq!(plan.n_colors(), 6);
        assert_eq!(plan.color_offsets(), &[0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn level_example_groups() {
        // rows 0 and 2 independent; 1 depends on 0; 3 depends on 1 and 2
        let a = CsrMatrix::from_triplets(
            4,
            4,
            vec![(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 1, 1.0), (3, 2, 1.0), (3, 3, 1.0)],
        )
        .unwrap();
        let plan = level_schedule(&a).unwrap();
        assert_eq!(plan.color_offsets(), &[0, 2, 3, 4]);
        assert_eq!(plan.inverse_permutation(), &[0, 2, 1, 3]);
    }

    #[test]
    fn coloring_diagonal_and_clique() {
        let plan = graph_color(&CsrMatrix::identity(7), 3, None).unwrap();
        assert_eq!(plan.n_colors(), 1);
        let dense = CsrMatrix::from_dense(4, 4, &[1.0; 16]).unwrap();
        for seed in 0..5 {
            let plan = graph_color(&dense, seed, None).unwrap();
            assert_eq!(plan.n_colors(), 4);
            assert_eq!(plan.color_offsets(), &[0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn coloring_cap_of_one_gives_n_colors() {
        let plan = graph_color(&CsrMatrix::identity(5), 11, Some(1)).unwrap();
        assert_eq!(plan.n_colors(), 5);
    }

    #[test]
    fn coloring_is_seeded() {
        let a = lower_bidiagonal(30);
        assert_eq!(graph_color(&a, 42, None).unwrap(), graph_color(&a, 42, None).unwrap());
        assert_eq!(graph_color(&a, 42, None).unwrap().seed(), Some(42));
    }

    #[test]
    fn reversal_of_diagonal() {
        let a = CsrMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let plan = ReorderPlan::from_permutation(vec![2, 1, 0]).unwrap();
        let b = apply_reorder(&a, &plan).unwrap();
        assert_eq!(b.values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn identity_plan_is_noop() {
        let a = lower_bidiagonal(4);
        assert_eq!(apply_reorder(&a, &ReorderPlan::identity(4)).unwrap(), a);
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(apply_reorder_vector(&x, &ReorderPlan::identity(4), Direction::Forward).unwrap(), x.to_vec());
    }

    #[test]
    fn vector_round_trip() {
        let plan = ReorderPlan::from_permutation(vec![3, 0, 2, 1]).unwrap();
        let x = [1.5, -2.0, 0.25, 9.0];
        let fwd = apply_reorder_vector(&x, &plan, Direction::Forward).unwrap();
        assert_eq!(fwd, vec![-2.0, 9.0, 0.25, 1.5]);
        assert_eq!(apply_reorder_vector(&fwd, &plan, Direction::Inverse).unwrap(), x.to_vec());
    }

    #[test]
    fn errors() {
        let rect = CsrMatrix::from_triplets(2, 3, vec![(0, 0, 1.0)]).unwrap();
        assert!(matches!(level_schedule(&rect), Err(ReorderError::Matrix(MatrixError::NotSquare { .. }))));
        assert!(matches!(graph_color(&rect, 0, None), Err(ReorderError::Matrix(MatrixError::NotSquare { .. }))));
        let plan = ReorderPlan::identity(3);
        assert!(matches!(
            apply_reorder(&CsrMatrix::identity(2), &plan),
            Err(ReorderError::PlanMismatch { plan: 3, matrix: 2 })
        ));
        assert!(apply_reorder_vector(&[1.0], &plan, Direction::Inverse).is_err());
        assert!(ReorderPlan::from_permutation(vec![0, 0]).is_err());
    }
}
