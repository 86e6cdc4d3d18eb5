//! PV and battery degradation costs.
//!
//! The battery is priced per discharged MWh inside the MILP. After a solve
//! its SOC trace is rainflow counted, and each counted cycle is charged
//! `factor(dod) · dod · capacity`, where `factor` is the replacement cost
//! spread over the cycle life at that depth.

mod rainflow;

pub use rainflow::{count_cycles, rainflow_cycles, turning_points, Cycle, CycleCount, MIN_RANGE};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::scenario::{CycleLifeCurve, ResolutionMode, ScenarioParams};
use crate::sizing::SizingResult;

/// Default number of DOD levels (10 % steps).
pub const DEFAULT_BINS: usize = 10;

/// PV degradation cost per year for a plant of `s_pv` MW.
pub fn pv_deg_cost(params: &ScenarioParams, s_pv: f64) -> f64 {
    params.pv_rep_frac * params.pv_capital * s_pv * params.pv_deg_rate
}

/// Battery degradation cost per discharged MWh when cycling to `dod`.
pub fn deg_factor(params: &ScenarioParams, curve: &CycleLifeCurve, dod: f64) -> Result<f64> {
    let cycles = curve.cycle_life_at(dod)?;
    Ok(params.bess_capital * params.bess_rep_frac / cycles)
}

/// Degradation factor evaluated at each DOD level.
#[derive(Debug, Clone, PartialEq)]
pub struct DegFactorTable {
    factors: Vec<f64>,
}

impl DegFactorTable {
    pub fn new(params: &ScenarioParams, curve: &CycleLifeCurve, n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::Domain("n_bins must be positive".into()));
        }
        let factors = (1..=n_bins)
            .map(|i| deg_factor(params, curve, i as f64 / n_bins as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors })
    }

    pub fn from_factors(factors: Vec<f64>) -> Self {
        Self { factors }
    }

    pub fn n_bins(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            factors: self.factors.iter().map(|f| f * k).collect(),
        }
    }
}

/// Cycle-resolved battery degradation cost of one counted trace.
pub fn actual_deg_cost(counts: &CycleCount, factors: &DegFactorTable, s_bess: f64) -> Result<f64> {
    if counts.n_bins() != factors.n_bins() {
        return Err(Error::Domain(format!(
            "cycle count has {} DOD levels but the factor table has {}",
            counts.n_bins(),
            factors.n_bins()
        )));
    }
    Ok(counts
        .bins()
        .zip(factors.factors())
        .map(|((dod, n), f)| n * f * dod * s_bess)
        .sum())
}

/// Count-weighted mean DOD snapped to the nearest level, or `None` when no
/// cycle was counted.
pub fn average_dod(counts: &CycleCount) -> Option<f64> {
    let total = counts.total();
    if total <= 0.0 {
        return None;
    }
    let mean = counts.bins().map(|(dod, n)| dod * n).sum::<f64>() / total;
    let n = counts.n_bins() as f64;
    // guard against 0.45 landing on 4.4999999 after scaling
    let step = (mean * n + 1e-9).round().clamp(1.0, n);
    Some(step / n)
}

/// Battery SOC traces (fractions of capacity) to rainflow count.
///
/// Daily-anchored resolutions give one trace per represented day, each
/// starting from the initial level. A full year is one continuous trace.
pub fn soc_traces(result: &SizingResult, resolution: ResolutionMode) -> Vec<Vec<f64>> {
    let cap = result.sizes.bess;
    if !result.has_storage() || cap <= MIN_RANGE || result.soc.is_empty() {
        return Vec::new();
    }
    let frac = |e: f64| (e / cap).clamp(0.0, 1.0);
    let start = frac(result.e_init);
    if resolution.anchors_daily() {
        result
            .soc
            .chunks(result.hours())
            .map(|day| std::iter::once(start).chain(day.iter().map(|&e| frac(e))).collect())
            .collect()
    } else {
        vec![std::iter::once(start)
            .chain(result.soc.iter().map(|&e| frac(e)))
            .collect()]
    }
}

/// Rainflow counts summed over every represented day (not α-scaled).
pub fn count_result_cycles(
    result: &SizingResult,
    resolution: ResolutionMode,
    n_bins: usize,
    exec: Execution,
) -> Result<CycleCount> {
    let traces = soc_traces(result, resolution);
    let per_trace = exec.map(&traces, |t| count_cycles(t, n_bins));
    let mut total = CycleCount::empty(n_bins);
    for c in per_trace {
        total.merge(&c?);
    }
    Ok(total)
}
