use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::meta::{FactorsMeta, MatrixMeta};
use super::solver::{model_solver, PerfEstimate};
use super::PerfConfig;
use crate::error::ModelError;

pub const DSE_REPORT_SCHEMA: &str = "solver-kit.dse.v1";

/// The parameter whose doubling saves the most cycles at a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bottleneck {
    Multipliers,
    Bandwidth,
    Ports,
    None,
}

impl Bottleneck {
    pub fn label(self) -> &'static str {
        match self {
            Self::Multipliers => "multipliers",
            Self::Bandwidth => "bandwidth",
            Self::Ports => "ports",
            Self::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DseRow {
    pub n_multipliers: u32,
    pub ext_bandwidth_gbps: f64,
    pub n_internal_ports: u32,
    pub total_cycles: u64,
    pub wall_time_ms: f64,
    pub gflops: f64,
    pub bottleneck: Bottleneck,
    /// Cycles saved by doubling multipliers, bandwidth and ports.
    pub savings: [i64; 3],
    pub estimate: PerfEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DseReport {
    pub schema: &'static str,
    pub iterations: f64,
    pub rows: Vec<DseRow>,
}

/// Cartesian product of the three axes, multipliers outermost and ports
/// innermost, with every other field taken from `base`.
pub fn dse_grid(base: &PerfConfig, multipliers: &[u32], bandwidths: &[f64], ports: &[u32]) -> Vec<PerfConfig> {
    let mut grid = Vec::with_capacity(multipliers.len() * bandwidths.len() * ports.len());
    for &n_multipliers in multipliers {
        for &ext_bandwidth_gbps in bandwidths {
            for &n_internal_ports in ports {
                grid.push(PerfConfig { n_multipliers, ext_bandwidth_gbps, n_internal_ports, ..*base });
            }
        }
    }
    grid
}

fn evaluate(meta: &MatrixMeta, factors: &FactorsMeta, iterations: f64, cfg: &PerfConfig) -> Result<DseRow, ModelError> {
    let estimate = model_solver(meta, factors, cfg, iterations)?;
    let total = estimate.total_cycles;
    let doubled = [
        PerfConfig { n_multipliers: cfg.n_multipliers * 2, ..*cfg },
        PerfConfig { ext_bandwidth_gbps: cfg.ext_bandwidth_gbps * 2.0, ..*cfg },
        PerfConfig { n_internal_ports: cfg.n_internal_ports * 2, ..*cfg },
    ];
    let mut savings = [0i64; 3];
    for (s, d) in savings.iter_mut().zip(&doubled) {
        *s = total as i64 - model_solver(meta, factors, d, iterations)?.total_cycles as i64;
    }
    let kinds = [Bottleneck::Multipliers, Bottleneck::Bandwidth, Bottleneck::Ports];
    let mut bottleneck = Bottleneck::None;
    let mut best = 0;
    for (kind, &s) in kinds.into_iter().zip(&savings) {
        if s > best {
            best = s;
            bottleneck = kind;
        }
    }
    Ok(DseRow {
        n_multipliers: cfg.n_multipliers,
        ext_bandwidth_gbps: cfg.ext_bandwidth_gbps,
        n_internal_ports: cfg.n_internal_ports,
        total_cycles: total,
        wall_time_ms: estimate.wall_time_ms,
        gflops: estimate.gflops,
        bottleneck,
        savings,
        estimate,
    })
}

/// Evaluates every grid point, in parallel, and labels its bottleneck.
/// Rows come back in grid order.
pub fn dse_sweep(
    meta: &MatrixMeta,
    factors: &FactorsMeta,
    iterations: f64,
    grid: &[PerfConfig],
) -> Result<DseReport, ModelError> {
    if grid.is_empty() {
        return Err(ModelError::EmptyGrid);
    }
    let rows = grid.par_iter().map(|cfg| evaluate(meta, factors, iterations, cfg)).collect::<Result<Vec<_>, _>>()?;
    Ok(DseReport { schema: DSE_REPORT_SCHEMA, iterations, rows })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    n_multipliers: u32,
    ext_bandwidth_gbps: f64,
    n_internal_ports: u32,
    total_cycles: u64,
    wall_time_ms: f64,
    gflops: f64,
    bottleneck: &'a str,
}

pub fn write_dse_csv<W: Write>(report: &DseReport, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in &report.rows {
        w.serialize(CsvRow {
            n_multipliers: r.n_multipliers,
            ext_bandwidth_gbps: r.ext_bandwidth_gbps,
            n_internal_ports: r.n_internal_ports,
            total_cycles: r.total_cycles,
            wall_time_ms: r.wall_time_ms,
            gflops: r.gflops,
            bottleneck: r.bottleneck.label(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (MatrixMeta, FactorsMeta) {
        (MatrixMeta::synthetic(5000, 40_000, 8).unwrap(), FactorsMeta::synthetic(5000, 17_000, 17_000, 8).unwrap())
    }

    #[test]
    fn empty_grid() {
        let (m, f) = sample();
        assert_eq!(dse_sweep(&m, &f, 1.0, &[]).unwrap_err(), ModelError::EmptyGrid);
    }

    #[test]
    fn single_point_and_csv_header() {
        let (m, f) = sample();
        let report = dse_sweep(&m, &f, 2.5, &[PerfConfig::default()]).unwrap();
        assert_eq!(report.rows.len(), 1);
        let mut buf = Vec::new();
        write_dse_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n_multipliers,ext_bandwidth_gbps,n_internal_ports,total_cycles,wall_time_ms,gflops,bottleneck"
        );
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn grid_order() {
        let g = dse_grid(&PerfConfig::default(), &[2, 4], &[10.0, 20.0, 40.0], &[1, 2]);
        assert_eq!(g.len(), 12);
        assert_eq!((g[0].n_multipliers, g[0].ext_bandwidth_gbps, g[0].n_internal_ports), (2, 10.0, 1));
        assert_eq!((g[1].n_multipliers, g[1].ext_bandwidth_gbps, g[1].n_internal_ports), (2, 10.0, 2));
        assert_eq!((g[11].n_multipliers, g[11].ext_bandwidth_gbps, g[11].n_internal_ports), (4, 40.0, 2));
    }

    #[test]
    fn saturated_bandwidth_is_flat() {
        let (m, f) = sample();
        let grid = dse_grid(&PerfConfig::default(), &[8], &[1e6, 1e7, 1e8], &[4]);
        let r = dse_sweep(&m, &f, 3.0, &grid).unwrap();
        assert_eq!(r.rows[0].total_cycles, r.rows[1].total_cycles);
        assert_eq!(r.rows[1].total_cycles, r.rows[2].total_cycles);
        assert_ne!(r.rows[2].bottleneck, Bottleneck::Bandwidth);
    }
}
