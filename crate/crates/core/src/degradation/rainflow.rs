//! Four-point rainflow counting.

use crate::error::{Error, Result};

/// One extracted cycle: `weight` is 1.0 for a full cycle, 0.5 for a
/// residual half cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cycle {
    pub range: f64,
    pub weight: f64,
}

/// Reduce a series to its turning points (local extrema plus both ends).
pub fn turning_points(series: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(series.len());
    for &x in series {
        if out.last() == Some(&x) {
            continue;
        }
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            // b is not an extremum if the walk keeps going the same way
            if (b - a) * (x - b) > 0.0 {
                out.pop();
            }
        }
        out.push(x);
    }
    out
}

/// Extract full and half cycles from `series`.
///
/// Turning points are pushed onto a stack; whenever the inner range of the
/// top four points is enclosed by both outer ranges the inner pair is a full
/// cycle and is removed. What remains on the stack is counted as half cycles.
pub fn rainflow_cycles(series: &[f64]) -> Vec<Cycle> {
    let mut cycles = Vec::new();
    let mut stack: Vec<f64> = Vec::new();
    for x in turning_points(series) {
        stack.push(x);
        while stack.len() >= 4 {
            let n = stack.len();
            let (a, b, c, d) = (stack[n - 4], stack[n - 3], stack[n - 2], stack[n - 1]);
            let inner = (c - b).abs();
            if inner <= (b - a).abs() && inner <= (d - c).abs() {
                cycles.push(Cycle {
                    range: inner,
                    weight: 1.0,
                });
                stack.truncate(n - 3);
                stack.push(d);
            } else {
                break;
            }
        }
    }
    for w in stack.windows(2) {
        cycles.push(Cycle {
            range: (w[1] - w[0]).abs(),
            weight: 0.5,
        });
    }
    cycles
}

/// Ranges at or below this are treated as solver noise and not binned.
pub const MIN_RANGE: f64 = 1e-9;

/// Cycle counts per DOD level. Level `i` (0-based) is `(i + 1) / n_bins`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleCount {
    counts: Vec<f64>,
}

impl CycleCount {
    pub fn empty(n_bins: usize) -> Self {
        Self {
            counts: vec![0.0; n_bins],
        }
    }

    pub fn from_counts(counts: Vec<f64>) -> Self {
        Self { counts }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn level(&self, i: usize) -> f64 {
        (i + 1) as f64 / self.counts.len() as f64
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// `(dod_level, count)` for every bin.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.counts.iter().enumerate().map(|(i, &c)| (self.level(i), c))
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Bin index holding a cycle of depth `range`: `ceil(range · n) − 1`,
    /// clamped to the top bin.
    pub fn bin_of(n_bins: usize, range: f64) -> usize {
        let scaled = (range * n_bins as f64 - 1e-9).ceil();
        (scaled.max(1.0) as usize).min(n_bins) - 1
    }

    pub fn add_cycle(&mut self, cycle: Cycle) {
        if cycle.range > MIN_RANGE {
            let i = Self::bin_of(self.counts.len(), cycle.range);
            self.counts[i] += cycle.weight;
        }
    }

    pub fn merge(&mut self, other: &CycleCount) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

/// Rainflow-count a SOC series (fractions of capacity) into `n_bins` DOD
/// levels. An empty or single-point series counts nothing.
pub fn count_cycles(soc: &[f64], n_bins: usize) -> Result<CycleCount> {
    if n_bins == 0 {
        return Err(Error::Domain("n_bins must be positive".into()));
    }
    if let Some(&bad) = soc.iter().find(|&&x| !(-1e-6..=1.0 + 1e-6).contains(&x)) {
        return Err(Error::Domain(format!("SOC value {bad} outside [0, 1]")));
    }
    let mut counts = CycleCount::empty(n_bins);
    for c in rainflow_cycles(soc) {
        counts.add_cycle(c);
    }
    Ok(counts)
}
