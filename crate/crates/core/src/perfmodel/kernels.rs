use serde::{Deserialize, Serialize};

use super::meta::{FactorsMeta, MatrixMeta};
use super::PerfConfig;
use crate::error::ModelError;
use crate::sparstition::ColorSizes;

/// Bytes of column index and of row offset per matrix entry.
const INDEX_BYTES: u64 = 4;

pub(crate) fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

pub(crate) fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        u64::from(64 - (x - 1).leading_zeros())
    }
}

/// First cycle `t ≥ 1` with `t · rate ≥ need`.
pub(crate) fn arrival(need: u64, rate: f64) -> u64 {
    let need_f = need as f64;
    let mut t = ((need_f / rate).ceil() as u64).max(1);
    while t > 1 && ((t - 1) as f64) * rate >= need_f {
        t -= 1;
    }
    while (t as f64) * rate < need_f {
        t += 1;
    }
    t
}

/// Cycle in which the last input line is consumed when `items` entries are
/// streamed in lines of `lanes`, the slowest stream carrying `bytes` per
/// entry at `rate` bytes per cycle. Line `k` leaves at
/// `max(leave(k−1) + 1, arrival(k))`; because arrival times grow by a
/// fixed step except for the last line, the maximum of that recurrence is
/// reached at line 1, line K−1 or line K.
pub(crate) fn stream_cycles(items: u64, lanes: u64, bytes: u64, rate: f64) -> u64 {
    if items == 0 {
        return 0;
    }
    let lines = ceil_div(items, lanes);
    let at = |k: u64| arrival((k * lanes).min(items) * bytes, rate);
    let mut done = (at(1) + lines - 1).max(at(lines));
    if lines >= 2 {
        done = done.max(at(lines - 1) + 1);
    }
    done
}

/// Active lane counts: powers of two up to the multiplier count.
fn lane_options(cfg: &PerfConfig) -> impl Iterator<Item = u64> {
    let max = u64::from(cfg.n_multipliers);
    (0..=max.trailing_zeros()).map(|s| 1u64 << s)
}

/// Evaluates `cost` at every lane option and keeps the cheapest, so adding
/// multipliers can never slow a kernel down.
pub(crate) fn best_lanes(cfg: &PerfConfig, cost: impl Fn(u64) -> u64) -> (u64, u64) {
    lane_options(cfg).map(|l| (cost(l), l)).min().expect("at least one lane option")
}

fn matrix_stream_rate(cfg: &PerfConfig) -> f64 {
    cfg.ext_bytes_per_cycle() / 3.0
}

fn matrix_entry_bytes(cfg: &PerfConfig) -> u64 {
    u64::from(cfg.value_width_bytes).max(INDEX_BYTES)
}

fn spmv_pipeline_latency(cfg: &PerfConfig, lanes: u64) -> u64 {
    u64::from(cfg.fp_mul_latency_cycles) + u64::from(cfg.fp_add_latency_cycles) * (ceil_log2(lanes) + 1)
}

/// Setup, streaming and pipeline drain of one color; zero without nonzeros.
fn color_compute(c: &ColorSizes, cfg: &PerfConfig, lanes: u64, extra_latency: u64) -> u64 {
    if c.n_nonzeros == 0 {
        return 0;
    }
    u64::from(cfg.setup_cycles)
        + stream_cycles(c.n_nonzeros as u64, lanes, matrix_entry_bytes(cfg), matrix_stream_rate(cfg))
        + spmv_pipeline_latency(cfg, lanes)
        + extra_latency
}

pub(crate) fn spmv_color_cycles(c: &ColorSizes, cfg: &PerfConfig, lanes: u64) -> u64 {
    let ports = u64::from(cfg.n_internal_ports);
    ceil_div(c.n_vector_indices as u64, ports) + color_compute(c, cfg, lanes, 0) + u64::from(cfg.write_overhead_cycles)
}

pub(crate) fn spmv_per_color(meta: &MatrixMeta, cfg: &PerfConfig, lanes: u64) -> Vec<u64> {
    meta.colors.iter().map(|c| spmv_color_cycles(c, cfg, lanes)).collect()
}

/// Cycles of one SpMV: per color, the vector partition transfer, the
/// matrix streaming through the pipeline and the write-back overhead.
pub fn model_spmv(meta: &MatrixMeta, cfg: &PerfConfig) -> Result<u64, ModelError> {
    cfg.validate()?;
    Ok(best_lanes(cfg, |l| spmv_per_color(meta, cfg, l).iter().sum()).0)
}

/// One substitution color: partition transfer, P-vector transfer, the
/// pipeline plus the subtraction, and the write to on-chip memory.
pub(crate) fn ilu0_color_cycles(c: &ColorSizes, cfg: &PerfConfig, lanes: u64) -> u64 {
    let ports = u64::from(cfg.n_internal_ports);
    let rows = ceil_div(c.n_rows as u64, ports);
    ceil_div(c.n_vector_indices as u64, ports)
        + rows
        + color_compute(c, cfg, lanes, u64::from(cfg.fp_add_latency_cycles))
        + rows
}

pub(crate) fn ilu0_pass_per_color(meta: &MatrixMeta, cfg: &PerfConfig, lanes: u64) -> Vec<u64> {
    meta.colors.iter().map(|c| ilu0_color_cycles(c, cfg, lanes)).collect()
}

pub(crate) fn ilu0_cycles_at(factors: &FactorsMeta, cfg: &PerfConfig, lanes: u64) -> u64 {
    let delay = u64::from(cfg.ilu0_unit_delay_cycles);
    let l: u64 = ilu0_pass_per_color(&factors.lower, cfg, lanes).iter().sum();
    let u: u64 = ilu0_pass_per_color(&factors.upper, cfg, lanes).iter().sum();
    2 * delay + l + u
}

/// Cycles of one ILU0 application: a forward pass over `L` and a backward
/// pass over `U`, each paying the ILU0 unit delay once.
pub fn model_ilu0(factors: &FactorsMeta, cfg: &PerfConfig) -> Result<u64, ModelError> {
    cfg.validate()?;
    Ok(best_lanes(cfg, |l| ilu0_cycles_at(factors, cfg, l)).0)
}

/// Count of each vector operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OpMix {
    pub dot: u64,
    pub axpy: u64,
    pub norm: u64,
}

impl OpMix {
    pub fn scaled(self, k: u64) -> Self {
        Self { dot: self.dot * k, axpy: self.axpy * k, norm: self.norm * k }
    }

    pub fn plus(self, o: Self) -> Self {
        Self { dot: self.dot + o.dot, axpy: self.axpy + o.axpy, norm: self.norm + o.norm }
    }
}

/// Input vectors split the external bandwidth evenly.
fn vector_stream(n: u64, inputs: u64, lanes: u64, cfg: &PerfConfig) -> u64 {
    stream_cycles(n, lanes, u64::from(cfg.value_width_bytes), cfg.ext_bytes_per_cycle() / inputs as f64)
}

fn reduction_tail(cfg: &PerfConfig, lanes: u64) -> u64 {
    let add = u64::from(cfg.fp_add_latency_cycles);
    ceil_log2(lanes) * add + add * ceil_log2(add)
}

fn mul_add(cfg: &PerfConfig) -> u64 {
    u64::from(cfg.fp_mul_latency_cycles) + u64::from(cfg.fp_add_latency_cycles)
}

pub(crate) fn axpy_cycles(n: u64, lanes: u64, cfg: &PerfConfig) -> u64 {
    vector_stream(n, 2, lanes, cfg) + mul_add(cfg) + u64::from(cfg.write_overhead_cycles)
}

pub(crate) fn dot_cycles(n: u64, lanes: u64, cfg: &PerfConfig) -> u64 {
    vector_stream(n, 2, lanes, cfg) + mul_add(cfg) + reduction_tail(cfg, lanes)
}

pub(crate) fn norm_cycles(n: u64, lanes: u64, cfg: &PerfConfig) -> u64 {
    vector_stream(n, 1, lanes, cfg) + mul_add(cfg) + reduction_tail(cfg, lanes)
}

/// Per-operation cycles `(dot, axpy, norm)` on vectors of length `n`, each
/// at its best lane count.
pub(crate) fn vector_op_costs(n: u64, cfg: &PerfConfig) -> (u64, u64, u64) {
    (
        best_lanes(cfg, |l| dot_cycles(n, l, cfg)).0,
        best_lanes(cfg, |l| axpy_cycles(n, l, cfg)).0,
        best_lanes(cfg, |l| norm_cycles(n, l, cfg)).0,
    )
}

pub fn model_vector_ops(n: usize, mix: OpMix, cfg: &PerfConfig) -> Result<u64, ModelError> {
    cfg.validate()?;
    let (dot, axpy, norm) = vector_op_costs(n as u64, cfg);
    Ok(mix.dot * dot + mix.axpy * axpy + mix.norm * norm)
}

#[cfg(test)]
pub(crate) mod oracle {
    /// Steps the three FIFOs cycle by cycle. Each stream has received
    /// `t · rate` bytes by the end of cycle `t`; a line is consumed when all
    /// streams hold it, at most one per cycle.
    pub fn emulate(items: u64, lanes: u64, stream_bytes: &[u64], rate: f64) -> u64 {
        let lines = items.div_ceil(lanes);
        let mut consumed = 0;
        let mut t = 0u64;
        while consumed < lines {
            t += 1;
            let next = ((consumed + 1) * lanes).min(items);
            if stream_bytes.iter().all(|&b| (t as f64) * rate >= (next * b) as f64) {
                consumed += 1;
            }
        }
        t
    }
}
