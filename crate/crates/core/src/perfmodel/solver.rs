use serde::{Deserialize, Serialize};

use super::kernels::{
    best_lanes, ilu0_cycles_at, ilu0_pass_per_color, spmv_per_color, vector_op_costs, OpMix,
};
use super::meta::{FactorsMeta, MatrixMeta};
use super::PerfConfig;
use crate::error::ModelError;

/// How often each kernel runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KernelCounts {
    pub spmv: u64,
    pub ilu0: u64,
    pub vector: OpMix,
}

impl KernelCounts {
    /// Initial residual `r = b − A·x0` and its norm.
    pub const INIT: Self = Self { spmv: 1, ilu0: 0, vector: OpMix { dot: 0, axpy: 1, norm: 1 } };
    pub const FULL_ITERATION: Self = Self { spmv: 2, ilu0: 2, vector: OpMix { dot: 4, axpy: 6, norm: 2 } };
    /// Up to the convergence check after the first half-step.
    pub const HALF_ITERATION: Self = Self { spmv: 1, ilu0: 1, vector: OpMix { dot: 2, axpy: 4, norm: 1 } };

    /// Kernel counts for a run of `iterations`, which must be a
    /// non-negative multiple of 0.5.
    pub fn for_iterations(iterations: f64) -> Result<Self, ModelError> {
        let halves = iterations * 2.0;
        if !(iterations >= 0.0 && halves.is_finite() && halves.fract() == 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "iterations must be a non-negative multiple of 0.5, got {iterations}"
            )));
        }
        let halves = halves as u64;
        let (full, half) = (halves / 2, halves % 2);
        Ok(Self::INIT.plus(Self::FULL_ITERATION.scaled(full)).plus(Self::HALF_ITERATION.scaled(half)))
    }

    fn scaled(self, k: u64) -> Self {
        Self { spmv: self.spmv * k, ilu0: self.ilu0 * k, vector: self.vector.scaled(k) }
    }

    fn plus(self, o: Self) -> Self {
        Self { spmv: self.spmv + o.spmv, ilu0: self.ilu0 + o.ilu0, vector: self.vector.plus(o.vector) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfEstimate {
    pub config: PerfConfig,
    pub iterations: f64,
    pub counts: KernelCounts,
    /// `spmv_cycles + ilu0_cycles + vector_op_cycles`
    pub total_cycles: u64,
    pub spmv_cycles: u64,
    pub ilu0_cycles: u64,
    pub vector_op_cycles: u64,
    /// One SpMV, per color.
    pub spmv_per_color: Vec<u64>,
    /// One forward pass over `L`, per color.
    pub ilu0_lower_per_color: Vec<u64>,
    /// One backward pass over `U`, per color.
    pub ilu0_upper_per_color: Vec<u64>,
    pub spmv_lanes: u64,
    pub ilu0_lanes: u64,
    pub flops: u64,
    /// Bytes read from external memory by all kernels.
    pub ext_bytes: u64,
    pub wall_time_ms: f64,
    pub gflops: f64,
}

/// Sums the kernel models over the BiCGStab operation mix of `iterations`.
pub fn model_solver(
    meta: &MatrixMeta,
    factors: &FactorsMeta,
    cfg: &PerfConfig,
    iterations: f64,
) -> Result<PerfEstimate, ModelError> {
    cfg.validate()?;
    let counts = KernelCounts::for_iterations(iterations)?;
    let (spmv_one, spmv_lanes) = best_lanes(cfg, |l| spmv_per_color(meta, cfg, l).iter().sum());
    let (ilu0_one, ilu0_lanes) = best_lanes(cfg, |l| ilu0_cycles_at(factors, cfg, l));
    let (dot, axpy, norm) = vector_op_costs(meta.n as u64, cfg);

    let spmv_cycles = counts.spmv * spmv_one;
    let ilu0_cycles = counts.ilu0 * ilu0_one;
    let mix = counts.vector;
    let vector_op_cycles = mix.dot * dot + mix.axpy * axpy + mix.norm * norm;
    let total_cycles = spmv_cycles + ilu0_cycles + vector_op_cycles;

    let n = meta.n as u64;
    let factor_nnz = (factors.lower.nnz + factors.upper.nnz) as u64;
    // substitutions also subtract from P and divide by the diagonal
    let flops = counts.spmv * 2 * meta.nnz as u64
        + counts.ilu0 * (2 * factor_nnz + 2 * n)
        + (mix.dot + mix.axpy + mix.norm) * 2 * n;
    let width = u64::from(cfg.value_width_bytes);
    let entry = width + 8;
    let ext_bytes = counts.spmv * meta.nnz as u64 * entry
        + counts.ilu0 * factor_nnz * entry
        + (2 * (mix.dot + mix.axpy) + mix.norm) * n * width;

    let wall_time_ms = cfg.cycles_to_ms(total_cycles);
    let gflops = if wall_time_ms > 0.0 { flops as f64 / (wall_time_ms * 1e6) } else { 0.0 };
    Ok(PerfEstimate {
        config: *cfg,
        iterations,
        counts,
        total_cycles,
        spmv_cycles,
        ilu0_cycles,
        vector_op_cycles,
        spmv_per_color: spmv_per_color(meta, cfg, spmv_lanes),
        ilu0_lower_per_color: ilu0_pass_per_color(&factors.lower, cfg, ilu0_lanes),
        ilu0_upper_per_color: ilu0_pass_per_color(&factors.upper, cfg, ilu0_lanes),
        spmv_lanes,
        ilu0_lanes,
        flops,
        ext_bytes,
        wall_time_ms,
        gflops,
    })
}
