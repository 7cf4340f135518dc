use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solver_kit::gallery::wathen;
use solver_kit::perfmodel::{
    dse_grid, dse_sweep, model_solver, solver_metas, write_dse_csv, Bottleneck, FactorsMeta, MatrixMeta, PerfConfig,
};
use solver_kit::reorder::level_schedule;

fn norne() -> (MatrixMeta, FactorsMeta) {
    (
        MatrixMeta::synthetic(133_293, 1_314_999, 64).unwrap(),
        FactorsMeta::synthetic(133_293, 726_369, 513_512, 64).unwrap(),
    )
}

fn point(mults: u32, bw: f64, ports: u32) -> PerfConfig {
    PerfConfig { n_multipliers: mults, ext_bandwidth_gbps: bw, n_internal_ports: ports, ..PerfConfig::default() }
}

#[test]
fn norne_estimate_is_within_a_factor_two_of_measured() {
    // measured accelerator solve time for NORNE at 4.5 iterations: 58.0 ms
    let (m, f) = norne();
    let est = model_solver(&m, &f, &PerfConfig::default(), 4.5).unwrap();
    assert!((29.0..=116.0).contains(&est.wall_time_ms), "{} ms", est.wall_time_ms);
}

#[test]
fn saturating_every_resource_leaves_the_latency_floor() {
    let (m, f) = norne();
    let huge = point(1 << 20, 1e9, 1 << 20);
    let est = model_solver(&m, &f, &huge, 1.0).unwrap();
    let base = model_solver(&m, &f, &PerfConfig::default(), 1.0).unwrap();
    assert!(est.total_cycles * 10 < base.total_cycles);
    // per-color fixed costs survive
    let colors = m.n_colors() as u64;
    assert!(est.total_cycles >= colors * (PerfConfig::default().write_overhead_cycles as u64));
}

#[test]
fn measured_metas_match_the_matrix() {
    let a = wathen(10, 10, &mut ChaCha8Rng::seed_from_u64(4));
    let plan = level_schedule(&a).unwrap();
    let (m, f) = solver_metas(&a, &plan).unwrap();
    assert_eq!(m.n, a.n_rows());
    assert_eq!(m.nnz, a.nnz());
    assert_eq!(m.n_colors(), plan.n_colors());
    // strict lower plus strict upper plus the diagonal covers the pattern
    assert_eq!(f.lower.nnz + f.upper.nnz + a.n_rows(), a.nnz());
    let est = model_solver(&m, &f, &PerfConfig::default(), 2.0).unwrap();
    assert!(est.total_cycles > 0 && est.gflops > 0.0);
}

#[test]
fn dse_labels_and_csv() {
    let (m, f) = norne();
    let grid = dse_grid(&PerfConfig::default(), &[8], &[5.0, 10.0, 25.0, 50.0, 100.0], &[2]);
    let report = dse_sweep(&m, &f, 4.5, &grid).unwrap();
    let labels: Vec<Bottleneck> = report.rows.iter().map(|r| r.bottleneck).collect();
    assert_eq!(labels[0], Bottleneck::Bandwidth);
    assert_eq!(labels[4], Bottleneck::Ports);
    let mut buf = Vec::new();
    write_dse_csv(&report, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("n_multipliers,ext_bandwidth_gbps,n_internal_ports"));
}

#[test]
fn invalid_inputs_are_rejected() {
    let (m, f) = norne();
    assert!(model_solver(&m, &f, &point(3, 50.0, 2), 1.0).is_err());
    assert!(model_solver(&m, &f, &point(8, 0.0, 2), 1.0).is_err());
    assert!(model_solver(&m, &f, &PerfConfig::default(), 1.25).is_err());
    assert!(model_solver(&m, &f, &PerfConfig::default(), -0.5).is_err());
    assert!(dse_sweep(&m, &f, 1.0, &[]).is_err());
}

fn arb_meta() -> impl Strategy<Value = (MatrixMeta, FactorsMeta)> {
    (1usize..5000, 1usize..8, 1usize..32).prop_map(|(n, per_row, colors)| {
        let colors = colors.min(n);
        let nnz = n * per_row;
        let off = nnz - n;
        (
            MatrixMeta::synthetic(n, nnz, colors).unwrap(),
            FactorsMeta::synthetic(n, off / 2, off - off / 2, colors).unwrap(),
        )
    })
}

proptest! {
    #[test]
    fn more_resources_never_cost_cycles(
        (m, f) in arb_meta(),
        mexp in 0u32..5, bw in 1.0f64..200.0, pexp in 0u32..5, half in 0u32..20,
    ) {
        let iters = f64::from(half) / 2.0;
        let base = point(1 << mexp, bw, 1 << pexp);
        let c = model_solver(&m, &f, &base, iters).unwrap().total_cycles;
        for more in [point(2 << mexp, bw, 1 << pexp), point(1 << mexp, bw * 2.0, 1 << pexp), point(1 << mexp, bw, 2 << pexp)] {
            prop_assert!(model_solver(&m, &f, &more, iters).unwrap().total_cycles <= c);
        }
        let single = PerfConfig { value_width_bytes: 4, ..base };
        prop_assert!(model_solver(&m, &f, &single, iters).unwrap().total_cycles <= c);
    }

    #[test]
    fn more_iterations_cost_more((m, f) in arb_meta(), half in 0u32..20) {
        let cfg = PerfConfig::default();
        let a = model_solver(&m, &f, &cfg, f64::from(half) / 2.0).unwrap();
        let b = model_solver(&m, &f, &cfg, f64::from(half + 1) / 2.0).unwrap();
        prop_assert!(b.total_cycles > a.total_cycles);
        prop_assert!(b.flops > a.flops && b.ext_bytes > a.ext_bytes);
    }
}
