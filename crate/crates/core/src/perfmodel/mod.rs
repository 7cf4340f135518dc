//! Cycle-count model of a streaming accelerator running ILU0-preconditioned
//! BiCGStab.
//!
//! The model never looks at matrix values or vector data. It works from the
//! per-color sizes of the partitioned matrix and factors ([`MatrixMeta`])
//! and a hardware description ([`PerfConfig`]). Matrix arrays are streamed
//! from external memory on three ports that split the external bandwidth
//! equally. A pipeline input line of `lanes` entries is consumed once all
//! three streams hold it, at most one line per cycle. Vector partitions are
//! read from on-chip memory at one value per internal port per cycle.

mod dse;
mod kernels;
mod meta;
mod solver;

use serde::{Deserialize, Serialize};

pub use dse::{dse_grid, dse_sweep, write_dse_csv, Bottleneck, DseReport, DseRow, DSE_REPORT_SCHEMA};
pub use kernels::{model_ilu0, model_spmv, model_vector_ops, OpMix};
pub use meta::{solver_metas, FactorsMeta, MatrixMeta};
pub use solver::{model_solver, KernelCounts, PerfEstimate};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfConfig {
    /// Multipliers per unit, equal to the adder count. Must be a power of two.
    pub n_multipliers: u32,
    pub ext_bandwidth_gbps: f64,
    /// Values read from on-chip vector memory per cycle.
    pub n_internal_ports: u32,
    pub fp_add_latency_cycles: u32,
    pub fp_mul_latency_cycles: u32,
    pub clock_mhz: f64,
    /// 8 for double, 4 for single precision.
    pub value_width_bytes: u32,
    /// Per color, before the first matrix bytes arrive.
    pub setup_cycles: u32,
    /// Draining the final result lines of an SpMV color or an axpy.
    pub write_overhead_cycles: u32,
    /// Once per ILU0 substitution pass.
    pub ilu0_unit_delay_cycles: u32,
}

impl Default for PerfConfig {
    fn default() -> Self {
        Self {
            n_multipliers: 8,
            ext_bandwidth_gbps: 50.0,
            n_internal_ports: 2,
            fp_add_latency_cycles: 8,
            fp_mul_latency_cycles: 8,
            clock_mhz: 280.0,
            value_width_bytes: 8,
            setup_cycles: 64,
            write_overhead_cycles: 16,
            ilu0_unit_delay_cycles: 32,
        }
    }
}

impl PerfConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidConfig(msg));
        if self.n_multipliers == 0 || !self.n_multipliers.is_power_of_two() {
            return bad(format!("n_multipliers must be a positive power of two, got {}", self.n_multipliers));
        }
        if !(self.ext_bandwidth_gbps > 0.0 && self.ext_bandwidth_gbps.is_finite()) {
            return bad(format!("ext_bandwidth_gbps must be positive, got {}", self.ext_bandwidth_gbps));
        }
        if self.n_internal_ports == 0 {
            return bad("n_internal_ports must be positive".into());
        }
        if self.fp_add_latency_cycles == 0 || self.fp_mul_latency_cycles == 0 {
            return bad("floating-point latencies must be positive".into());
        }
        if !(self.clock_mhz > 0.0 && self.clock_mhz.is_finite()) {
            return bad(format!("clock_mhz must be positive, got {}", self.clock_mhz));
        }
        if self.value_width_bytes != 4 && self.value_width_bytes != 8 {
            return bad(format!("value_width_bytes must be 4 or 8, got {}", self.value_width_bytes));
        }
        Ok(())
    }

    /// External bytes delivered per clock cycle over all ports.
    pub fn ext_bytes_per_cycle(&self) -> f64 {
        self.ext_bandwidth_gbps * 1e3 / self.clock_mhz
    }

    pub fn cycles_to_ms(&self, cycles: u64) -> f64 {
        cycles as f64 / (self.clock_mhz * 1e3)
    }
}
