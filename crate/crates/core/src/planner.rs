//! Bandwidth-balance and arithmetic-intensity model.
//!
//! The worker count that balances an accelerator is the number of workers
//! whose combined streaming demand fits in the available bandwidth. The
//! arithmetic intensity is the steady-state op census of one diagonal cell
//! divided by the bytes that cell streams when nothing is cached.

use std::fmt;

use crate::config::Precision;
use crate::error::{Error, Result};
use crate::kernel::OpCensus;

/// Elements one steady-state cell moves with no cache:
/// two samples entering and two leaving the windows, `μ` and `σ` of both
/// windows, and a read plus write of `P` and `I` on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrafficCensus {
    pub series_reads: u32,
    pub stats_reads: u32,
    pub profile_reads: u32,
    pub profile_writes: u32,
}

impl TrafficCensus {
    pub const fn steady_state() -> Self {
        Self {
            series_reads: 4,
            stats_reads: 4,
            profile_reads: 4,
            profile_writes: 4,
        }
    }

    pub const fn elements(&self) -> u32 {
        self.series_reads + self.stats_reads + self.profile_reads + self.profile_writes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    ComputeBound,
    Balanced,
    MemoryBound,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::ComputeBound => "compute-bound",
            Regime::Balanced => "balanced",
            Regime::MemoryBound => "memory-bound",
        })
    }
}

pub fn element_bytes(precision: Precision) -> usize {
    match precision {
        Precision::Single => 4,
        Precision::Double => 8,
    }
}

/// FLOPs per byte of the steady-state diagonal cell.
///
/// Neither the window length nor the batch width changes the per-cell
/// census; they are accepted so callers state the kernel they mean.
pub fn arithmetic_intensity(_m: usize, precision: Precision, _batch_width: usize) -> f64 {
    let ops = OpCensus::steady_state().total() as f64;
    let bytes =
        (TrafficCensus::steady_state().elements() as usize * element_bytes(precision)) as f64;
    ops / bytes
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanReport {
    pub bandwidth: f64,
    pub per_worker_demand: f64,
    pub balanced_workers: usize,
    /// `balanced_workers × per_worker_demand`, GB/s.
    pub aggregate_demand: f64,
    /// Worker count the regime was judged for.
    pub requested_workers: usize,
    pub regime: Regime,
    pub precision: Precision,
    pub arithmetic_intensity: f64,
}

/// Largest worker count whose total demand fits in `bandwidth` (both GB/s).
pub fn balanced_workers(bandwidth: f64, per_worker_demand: f64) -> Result<PlanReport> {
    positive("bandwidth", bandwidth)?;
    positive("per-worker demand", per_worker_demand)?;
    // guard against quotients like 7.999999999 from decimal inputs
    let balanced = (bandwidth / per_worker_demand * (1.0 + 1e-12)).floor() as usize;
    let mut report = PlanReport {
        bandwidth,
        per_worker_demand,
        balanced_workers: balanced,
        aggregate_demand: balanced as f64 * per_worker_demand,
        requested_workers: balanced,
        regime: Regime::Balanced,
        precision: Precision::Double,
        arithmetic_intensity: arithmetic_intensity(0, Precision::Double, 1),
    };
    report.regime = report.classify(balanced);
    Ok(report)
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

impl PlanReport {
    /// Memory-bound when `workers` demand more than the bandwidth;
    /// compute-bound when they leave more than one worker's demand unused.
    pub fn classify(&self, workers: usize) -> Regime {
        let demand = workers as f64 * self.per_worker_demand;
        let slack = self.bandwidth - demand;
        let eps = 1e-9 * self.bandwidth;
        if demand > self.bandwidth + eps {
            Regime::MemoryBound
        } else if slack > self.per_worker_demand + eps {
            Regime::ComputeBound
        } else {
            Regime::Balanced
        }
    }

    pub fn for_workers(mut self, workers: usize) -> Self {
        self.requested_workers = workers;
        self.regime = self.classify(workers);
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self.arithmetic_intensity = arithmetic_intensity(0, precision, 1);
        self
    }

    /// One `key=value` pair per line.
    pub fn key_values(&self) -> String {
        let ops = OpCensus::steady_state();
        let traffic = TrafficCensus::steady_state();
        let precision = match self.precision {
            Precision::Single => "single",
            Precision::Double => "double",
        };
        [
            format!("bandwidth_gbps={}", self.bandwidth),
            format!("per_worker_gbps={}", self.per_worker_demand),
            format!("balanced_workers={}", self.balanced_workers),
            format!("aggregate_demand_gbps={}", self.aggregate_demand),
            format!("requested_workers={}", self.requested_workers),
            format!("regime={}", self.regime),
            format!("precision={precision}"),
            format!("flops_per_cell={}", ops.total()),
            format!(
                "bytes_per_cell={}",
                traffic.elements() as usize * element_bytes(self.precision)
            ),
            format!("arithmetic_intensity={:.6}", self.arithmetic_intensity),
        ]
        .join("\n")
    }

    /// Human-readable account of the model, including the op census.
    pub fn describe(&self) -> String {
        let ops = OpCensus::steady_state();
        let t = TrafficCensus::steady_state();
        let w = element_bytes(self.precision);
        format!(
            "{bw} GB/s at {d} GB/s per worker balances {bal} workers ({agg} GB/s).\n\
             {req} workers would be {regime}.\n\
             Per steady-state cell: {um} mul + {ua} add/sub for the dot-product update, \
             {dm} mul + {da} add/sub + {dd} div + {ds} sqrt for the distance, \
             {cc} clamp compares and {pc} profile compares = {total} ops.\n\
             Traffic per cell: {sr} series + {st} stats reads, {pr} profile reads and {pw} writes \
             = {el} elements x {w} B = {bytes} B.\n\
             Arithmetic intensity: {ai:.4} FLOP/B.",
            bw = self.bandwidth,
            d = self.per_worker_demand,
            bal = self.balanced_workers,
            agg = self.aggregate_demand,
            req = self.requested_workers,
            regime = self.regime,
            um = ops.update_mul,
            ua = ops.update_add,
            dm = ops.distance_mul,
            da = ops.distance_add,
            dd = ops.distance_div,
            ds = ops.distance_sqrt,
            cc = ops.clamp_cmp,
            pc = ops.profile_cmp,
            total = ops.total(),
            sr = t.series_reads,
            st = t.stats_reads,
            pr = t.profile_reads,
            pw = t.profile_writes,
            el = t.elements(),
            bytes = t.elements() as usize * w,
            ai = self.arithmetic_intensity,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reported_design_points() {
        assert_eq!(balanced_workers(240.0, 5.0).unwrap().balanced_workers, 48);
        assert_eq!(balanced_workers(38.4, 4.8).unwrap().balanced_workers, 8);
        assert_eq!(balanced_workers(5.0, 5.0).unwrap().balanced_workers, 1);
        let r = balanced_workers(256.0, 5.0).unwrap();
        assert_eq!(r.balanced_workers, 51);
        assert_eq!(r.classify(64), Regime::MemoryBound);
        assert_eq!(r.classify(32), Regime::ComputeBound);
        assert_eq!(r.classify(51), Regime::Balanced);
        let r = balanced_workers(240.0, 5.0).unwrap();
        assert_eq!(r.regime, Regime::Balanced);
        assert_eq!(r.aggregate_demand, 240.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(balanced_workers(0.0, 5.0).is_err());
        assert!(balanced_workers(10.0, -1.0).is_err());
        assert!(balanced_workers(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn monotone_in_inputs() {
        let mut prev = 0;
        for bw in 1..400 {
            let b = balanced_workers(bw as f64 * 0.7, 3.3)
                .unwrap()
                .balanced_workers;
            assert!(b >= prev);
            prev = b;
        }
        let mut prev = usize::MAX;
        for d in 1..200 {
            let b = balanced_workers(100.0, d as f64 * 0.25)
                .unwrap()
                .balanced_workers;
            assert!(b <= prev);
            prev = b;
        }
    }

    #[test]
    fn intensity() {
        let single = arithmetic_intensity(64, Precision::Single, 8);
        let double = arithmetic_intensity(64, Precision::Double, 8);
        assert_eq!(single, 2.0 * double);
        assert!(double > 0.0 && single < 1.0);
        assert_eq!(double, arithmetic_intensity(4096, Precision::Double, 1));
        assert_eq!(double, 17.0 / 128.0);
    }

    #[test]
    fn key_values_include_census() {
        let kv = balanced_workers(240.0, 5.0)
            .unwrap()
            .for_workers(64)
            .key_values();
        assert!(kv.contains("balanced_workers=48\n"));
        assert!(kv.contains("regime=memory-bound"));
        assert!(kv.contains("flops_per_cell=17"));
        assert!(kv.contains("bytes_per_cell=128"));
    }
}
