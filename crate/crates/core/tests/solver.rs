mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solver_kit::gallery::{poisson_2d, wathen};
use solver_kit::precond::PrecondKind;
use solver_kit::solver::{bicgstab, solve_reordered_consistency, true_residual_norm, ReorderKind, SolverConfig};
use solver_kit::CsrMatrix;

use common::dominant;

fn ones_rhs(a: &CsrMatrix) -> Vec<f64> {
    a.spmv(&vec![1.0; a.n_cols()]).unwrap()
}

fn iterations(a: &CsrMatrix, b: &[f64], p: PrecondKind, reduction: f64) -> f64 {
    let cfg = SolverConfig::relative(reduction).with_preconditioner(p).with_max_iterations(5000);
    let res = bicgstab(a, b, &vec![0.0; a.n_rows()], &cfg).unwrap();
    assert!(res.converged, "{} did not converge", p.label());
    res.iterations
}

#[test]
fn preconditioner_ordering_on_wathen_surrogate() {
    // b = A·1 makes D⁻¹b constant per node type, so Jacobi would finish in a
    // couple of steps; a random rhs shows the general ordering
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = wathen(12, 12, &mut rng);
    let b: Vec<f64> = (0..a.n_rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let ilu = iterations(&a, &b, PrecondKind::Ilu0, 1e-6);
    let jac = iterations(&a, &b, PrecondKind::Jacobi, 1e-6);
    let none = iterations(&a, &b, PrecondKind::None, 1e-6);
    assert!(ilu < jac && jac < none, "ilu0 {ilu}, jacobi {jac}, none {none}");
}

#[test]
fn residual_contract_holds_for_all_configurations() {
    let a = poisson_2d(24, 24);
    let b = ones_rhs(&a);
    let x0 = vec![0.0; a.n_rows()];
    let reorders = [
        ReorderKind::None,
        ReorderKind::LevelScheduling,
        ReorderKind::GraphColoring { seed: 5, max_rows_per_color: None },
    ];
    for p in PrecondKind::ALL {
        for r in reorders {
            for reduction in [1e-2, 1e-6, 1e-10] {
                let cfg = SolverConfig::relative(reduction).with_preconditioner(p).with_reorder(r).with_max_iterations(5000);
                let res = bicgstab(&a, &b, &x0, &cfg).unwrap();
                assert!(res.converged);
                let true_res = true_residual_norm(&a, &b, &res.x).unwrap();
                assert!(
                    true_res <= res.initial_residual_norm * reduction * 1.01,
                    "{} {} {reduction}: {true_res:e}",
                    p.label(),
                    r.label()
                );
                assert_eq!(res.iterations * 2.0, (res.iterations * 2.0).round());
            }
        }
    }
}

#[test]
fn reorderings_agree_on_the_solution() {
    let a = wathen(8, 8, &mut ChaCha8Rng::seed_from_u64(2));
    let b = ones_rhs(&a);
    let cfg = SolverConfig::relative(1e-10).with_preconditioner(PrecondKind::Ilu0);
    let report = solve_reordered_consistency(&a, &b, &cfg).unwrap();
    assert_eq!(report.runs.len(), 3);
    assert!(report.runs.iter().all(|r| r.converged));
    assert!(report.max_relative_difference < 1e-8, "{}", report.max_relative_difference);
}

#[test]
fn absolute_exit_condition() {
    let a = poisson_2d(10, 10);
    let b = ones_rhs(&a);
    let cfg = SolverConfig {
        exit: solver_kit::solver::ExitCondition::Absolute { threshold: 1e-3 },
        ..SolverConfig::default()
    };
    let res = bicgstab(&a, &b, &vec![0.0; a.n_rows()], &cfg).unwrap();
    assert!(res.converged);
    assert_eq!(res.conv_threshold, 1e-3);
    assert!(res.final_residual_norm <= 1e-3);
}

#[test]
fn exact_preconditioner_exits_at_the_half_step() {
    // ILU0 of a tridiagonal matrix is exact, so one half-step solves it
    let a = solver_kit::gallery::tridiagonal(50, -1.0, 3.0, -1.5);
    let b = ones_rhs(&a);
    let cfg = SolverConfig::relative(1e-8).with_preconditioner(PrecondKind::Ilu0);
    let res = bicgstab(&a, &b, &vec![0.0; a.n_rows()], &cfg).unwrap();
    assert!(res.converged);
    assert_eq!(res.iterations, 0.5);
    assert_eq!(res.residual_history.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reordering_does_not_change_the_answer(n in 2usize..40, density in 0.0f64..0.3, seed in any::<u64>()) {
        let a = dominant(&mut ChaCha8Rng::seed_from_u64(seed), n, density, true, true);
        let b = ones_rhs(&a);
        let x0 = vec![0.0; n];
        let base = SolverConfig::relative(1e-10).with_preconditioner(PrecondKind::Ilu0);
        let plain = bicgstab(&a, &b, &x0, &base).unwrap();
        let colored = bicgstab(&a, &b, &x0, &base.with_reorder(ReorderKind::GraphColoring { seed, max_rows_per_color: None })).unwrap();
        prop_assert!(plain.converged && colored.converged);
        for (u, v) in plain.x.iter().zip(&colored.x) {
            prop_assert!((u - 1.0).abs() < 1e-6 && (v - 1.0).abs() < 1e-6);
        }
    }
}
