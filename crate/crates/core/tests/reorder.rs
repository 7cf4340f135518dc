mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solver_kit::precond::{ilu0_apply_colored, IluFactors, IluPartitions};
use solver_kit::reorder::{apply_reorder, apply_reorder_vector, graph_color, level_schedule, Direction};
use solver_kit::sparstition::{build_partitions, gather, spmv_color};
use solver_kit::CsrMatrix;

use common::*;

fn arb_square() -> impl Strategy<Value = CsrMatrix> {
    (1usize..64, 0.0f64..0.15, any::<u64>())
        .prop_map(|(n, d, seed)| random_csr(&mut ChaCha8Rng::seed_from_u64(seed), n, n, d))
}

fn arb_dominant() -> impl Strategy<Value = CsrMatrix> {
    (1usize..48, 0.0f64..0.2, any::<u64>())
        .prop_map(|(n, d, seed)| dominant(&mut ChaCha8Rng::seed_from_u64(seed), n, d, true, true))
}

proptest! {
    #[test]
    fn level_schedule_invariants(a in arb_square()) {
        let plan = level_schedule(&a).unwrap();
        prop_assert!(check_plan_shape(&plan, a.n_rows()).is_ok());
        prop_assert_eq!(check_independent_colors(&a, &plan), Ok(()));
        prop_assert_eq!(check_order_preserved(&a, &plan), Ok(()));
    }

    #[test]
    fn coloring_invariants(a in arb_square(), seed in any::<u64>(), cap in proptest::option::of(1usize..8)) {
        let plan = graph_color(&a, seed, cap).unwrap();
        prop_assert!(check_plan_shape(&plan, a.n_rows()).is_ok());
        prop_assert_eq!(check_independent_colors(&a, &plan), Ok(()));
        if let Some(cap) = cap {
            prop_assert!((0..plan.n_colors()).all(|c| plan.color_rows(c).len() <= cap));
        }
        let again = graph_color(&a, seed, cap).unwrap();
        prop_assert_eq!(again.permutation(), plan.permutation());
    }

    #[test]
    fn permuting_commutes_with_spmv(a in arb_square(), seed in any::<u64>()) {
        let plan = graph_color(&a, seed, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..a.n_cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pa = apply_reorder(&a, &plan).unwrap();
        let px = apply_reorder_vector(&x, &plan, Direction::Forward).unwrap();
        let y = apply_reorder_vector(&pa.spmv(&px).unwrap(), &plan, Direction::Inverse).unwrap();
        let reference = a.spmv(&x).unwrap();
        for (u, v) in y.iter().zip(&reference) {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn per_color_spmv_reassembles_full_product(a in arb_square(), seed in any::<u64>()) {
        let plan = level_schedule(&a).unwrap();
        let pa = apply_reorder(&a, &plan).unwrap();
        let parts = build_partitions(&pa, &plan).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..pa.n_cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let full = pa.spmv(&x).unwrap();
        for c in 0..plan.n_colors() {
            let local = gather(&x, parts.indices(c)).unwrap();
            let y = spmv_color(&pa, &plan, &parts, c, &local).unwrap();
            let rows = plan.color_rows(c);
            prop_assert_eq!(&y[..], &full[rows]);
        }
    }

    #[test]
    fn colored_ilu0_matches_sequential(a in arb_dominant(), seed in any::<u64>(), level in any::<bool>()) {
        let plan = if level { level_schedule(&a) } else { graph_color(&a, seed, None) }.unwrap();
        let pa = apply_reorder(&a, &plan).unwrap();
        let f = IluFactors::factor(&pa).unwrap();
        let parts = IluPartitions::build(&f, &plan).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..pa.n_rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let seq: Vec<u64> = f.apply(&x).unwrap().iter().map(|v| v.to_bits()).collect();
        let col: Vec<u64> = ilu0_apply_colored(&f, &plan, &parts, &x).unwrap().iter().map(|v| v.to_bits()).collect();
        prop_assert_eq!(seq, col);
    }
}

#[test]
fn diagonal_matrix_is_one_level() {
    let a = CsrMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
    assert_eq!(level_schedule(&a).unwrap().n_colors(), 1);
    assert_eq!(graph_color(&a, 3, None).unwrap().n_colors(), 1);
}

#[test]
fn bidiagonal_matrix_is_fully_sequential() {
    let a = solver_kit::gallery::lower_bidiagonal(10);
    let plan = level_schedule(&a).unwrap();
    assert_eq!(plan.n_colors(), 10);
    assert_eq!(plan.permutation(), (0..10).collect::<Vec<_>>());
}

#[test]
fn rectangular_matrix_is_rejected() {
    let a = CsrMatrix::from_triplets(2, 3, [(0, 0, 1.0)]).unwrap();
    assert!(level_schedule(&a).is_err());
    assert!(graph_color(&a, 0, None).is_err());
}
