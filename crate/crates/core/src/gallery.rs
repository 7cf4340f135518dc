//! Matrix generators for tests, benchmarks and examples. Random generators
//! take the caller's RNG so results are reproducible from a seed.

use rand::Rng;

use crate::matrix::{BsrMatrix, CsrMatrix};

/// Each entry is present independently with probability `density`; values
/// are uniform in `[-1, 1)`.
pub fn random_sparse(n_rows: usize, n_cols: usize, density: f64, rng: &mut impl Rng) -> CsrMatrix {
    let mut trip = Vec::new();
    for i in 0..n_rows {
        for j in 0..n_cols {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                trip.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    CsrMatrix::from_triplets(n_rows, n_cols, trip).expect("indices in range")
}

/// Lower triangular with a full diagonal in `[1, 2)`.
pub fn random_lower_triangular(n: usize, density: f64, rng: &mut impl Rng) -> CsrMatrix {
    let mut trip = Vec::new();
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                trip.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
        trip.push((i, i, rng.gen_range(1.0..2.0)));
    }
    CsrMatrix::from_triplets(n, n, trip).expect("indices in range")
}

/// Random pattern plus a full diagonal that strictly dominates its row.
pub fn diagonally_dominant(n: usize, density: f64, rng: &mut impl Rng) -> CsrMatrix {
    let mut trip = Vec::new();
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if j != i && rng.gen_bool(density.clamp(0.0, 1.0)) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                off += v.abs();
                trip.push((i, j, v));
            }
        }
        trip.push((i, i, off + rng.gen_range(1.0..2.0)));
    }
    CsrMatrix::from_triplets(n, n, trip).expect("indices in range")
}

/// Dense pattern, strictly diagonally dominant.
pub fn dense_diagonally_dominant(n: usize, rng: &mut impl Rng) -> CsrMatrix {
    diagonally_dominant(n, 1.0, rng)
}

/// Ones on the diagonal and the first subdiagonal.
pub fn lower_bidiagonal(n: usize) -> CsrMatrix {
    let trip = (0..n).flat_map(|i| {
        let sub = (i > 0).then(|| (i, i - 1, 1.0));
        sub.into_iter().chain(std::iter::once((i, i, 1.0)))
    });
    CsrMatrix::from_triplets(n, n, trip).expect("indices in range")
}

pub fn tridiagonal(n: usize, lower: f64, diag: f64, upper: f64) -> CsrMatrix {
    let mut trip = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            trip.push((i, i - 1, lower));
        }
        trip.push((i, i, diag));
        if i + 1 < n {
            trip.push((i, i + 1, upper));
        }
    }
    CsrMatrix::from_triplets(n, n, trip).expect("indices in range")
}

/// `tridiag(-1, 2, -1)`
pub fn poisson_1d(n: usize) -> CsrMatrix {
    tridiagonal(n, -1.0, 2.0, -1.0)
}

/// Five-point Laplacian on an `nx × ny` grid, row-major node numbering.
pub fn poisson_2d(nx: usize, ny: usize) -> CsrMatrix {
    let n = nx * ny;
    let mut trip = Vec::with_capacity(5 * n);
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if j > 0 {
                trip.push((k, k - nx, -1.0));
            }
            if i > 0 {
                trip.push((k, k - 1, -1.0));
            }
            trip.push((k, k, 4.0));
            if i + 1 < nx {
                trip.push((k, k + 1, -1.0));
            }
            if j + 1 < ny {
                trip.push((k, k + nx, -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, trip).expect("indices in range")
}

/// Consistent mass matrix of 8-node serendipity elements on an `nx × ny`
/// grid with a random density in `[0, 100)` per element. Symmetric positive
/// definite with `3·nx·ny + 2·nx + 2·ny + 1` rows.
pub fn wathen(nx: usize, ny: usize, rng: &mut impl Rng) -> CsrMatrix {
    const E1: [[f64; 4]; 4] = [[6., -6., 2., -8.], [-6., 32., -6., 20.], [2., -6., 6., -6.], [-8., 20., -6., 32.]];
    const E2: [[f64; 4]; 4] = [[3., -8., 2., -6.], [-8., 16., -8., 20.], [2., -8., 3., -8.], [-6., 20., -8., 16.]];
    let mut e = [[0.0; 8]; 8];
    for r in 0..4 {
        for c in 0..4 {
            e[r][c] = E1[r][c] / 45.0;
            e[r + 4][c + 4] = E1[r][c] / 45.0;
            e[r][c + 4] = E2[r][c] / 45.0;
            e[r + 4][c] = E2[c][r] / 45.0;
        }
    }
    let n = 3 * nx * ny + 2 * nx + 2 * ny + 1;
    let mut trip = Vec::with_capacity(64 * nx * ny);
    // node numbering from the classic 1-based formulation
    for j in 1..=ny {
        for i in 1..=nx {
            let mut nn = [0usize; 8];
            nn[0] = 3 * j * nx + 2 * i + 2 * j + 1;
            nn[1] = nn[0] - 1;
            nn[2] = nn[1] - 1;
            nn[3] = (3 * j - 1) * nx + 2 * j + i - 1;
            nn[4] = 3 * (j - 1) * nx + 2 * i + 2 * j - 3;
            nn[5] = nn[4] + 1;
            nn[6] = nn[5] + 1;
            nn[7] = nn[3] + 1;
            let rho = 100.0 * rng.gen::<f64>();
            for r in 0..8 {
                for c in 0..8 {
                    trip.push((nn[r] - 1, nn[c] - 1, rho * e[r][c]));
                }
            }
        }
    }
    CsrMatrix::from_triplets(n, n, trip).expect("indices in range")
}

/// Random block pattern; every diagonal block is present when the matrix
/// is block-square.
pub fn random_bsr(
    n_block_rows: usize,
    n_block_cols: usize,
    block_size: usize,
    density: f64,
    rng: &mut impl Rng,
) -> BsrMatrix {
    let area = block_size * block_size;
    let mut row_pointers = vec![0];
    let mut cols = Vec::new();
    let mut values = Vec::new();
    for i in 0..n_block_rows {
        for j in 0..n_block_cols {
            let on_diag = n_block_rows == n_block_cols && i == j;
            if on_diag || rng.gen_bool(density.clamp(0.0, 1.0)) {
                cols.push(j);
                values.extend((0..area).map(|_| rng.gen_range(-1.0..1.0)));
            }
        }
        row_pointers.push(cols.len());
    }
    BsrMatrix::new(block_size, n_block_rows, n_block_cols, row_pointers, cols, values).expect("valid block pattern")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wathen_shape_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = wathen(3, 2, &mut rng);
        assert_eq!(a.n_rows(), 3 * 6 + 6 + 4 + 1);
        for (i, j, v) in a.triplets() {
            assert!((a.get(j, i).unwrap() - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
        for i in 0..a.n_rows() {
            assert!(a.get(i, i).unwrap() > 0.0);
        }
    }

    #[test]
    fn poisson_2d_pattern() {
        let a = poisson_2d(3, 4);
        assert_eq!(a.n_rows(), 12);
        assert_eq!(a.nnz(), 5 * 12 - 2 * 3 - 2 * 4);
        assert!(a.is_structurally_symmetric());
    }

    #[test]
    fn lower_bidiagonal_nnz() {
        assert_eq!(lower_bidiagonal(5).nnz(), 9);
        assert_eq!(lower_bidiagonal(0).nnz(), 0);
    }

    #[test]
    fn dominance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = diagonally_dominant(30, 0.2, &mut rng);
        for i in 0..30 {
            let (cols, vals) = a.row(i);
            let off: f64 = cols.iter().zip(vals).filter(|(c, _)| **c != i).map(|(_, v)| v.abs()).sum();
            assert!(a.get(i, i).unwrap() > off);
        }
    }
}
