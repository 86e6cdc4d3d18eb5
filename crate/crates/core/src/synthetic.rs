//! Seeded synthetic year of hourly load and unit PV output.
//!
//! The load follows a hot-climate residential pattern: an early-evening
//! peak that grows in summer, with day-to-day noise. Its raw shape is
//! rescaled and passed through a power transform so the year hits a target
//! minimum, peak and mean exactly. PV is a clear-sky bell whose width follows day
//! length, dimmed by a random daily cloud factor.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scenario::{DayProfile, Profiles, HOURS};

pub const DEFAULT_SEED: u64 = 20_240_615;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadTargets {
    /// MW
    pub min: f64,
    /// MW
    pub peak: f64,
    /// MW
    pub mean: f64,
}

impl Default for LoadTargets {
    fn default() -> Self {
        Self {
            min: 0.05,
            peak: 0.8,
            mean: 0.17,
        }
    }
}

const DAYS: usize = 365;

fn raw_load(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(DAYS * HOURS);
    for d in 0..DAYS {
        // warmest around late July
        let season = 1.0 + 0.7 * (2.0 * PI * (d as f64 - 205.0) / 365.0).cos();
        let day_noise = 1.0 + 0.15 * (rng.gen::<f64>() - 0.5);
        for t in 0..HOURS {
            let h = t as f64;
            let evening = (-((h - 18.5) / 2.5).powi(2)).exp();
            let morning = 0.15 * (-((h - 7.5) / 2.0).powi(2)).exp();
            let base = 0.35 + morning + season * evening;
            out.push(base * day_noise * (1.0 + 0.1 * (rng.gen::<f64>() - 0.5)));
        }
    }
    out
}

/// Mean of `x^gamma` over `xs`.
fn powered_mean(xs: &[f64], gamma: f64) -> f64 {
    xs.iter().map(|x| x.powf(gamma)).sum::<f64>() / xs.len() as f64
}

fn shape_load(raw: &[f64], targets: LoadTargets) -> Result<Vec<f64>> {
    let LoadTargets { min, peak, mean } = targets;
    if !(0.0 <= min && min < mean && mean < peak) {
        return Err(Error::Domain(format!(
            "load targets need 0 <= min < mean < peak, got {min}, {mean}, {peak}"
        )));
    }
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unit: Vec<f64> = raw.iter().map(|x| (x - lo) / (hi - lo)).collect();
    let want = (mean - min) / (peak - min);
    // powered_mean falls monotonically in gamma
    let (mut a, mut b) = (1e-3, 1e3);
    if powered_mean(&unit, a) < want || powered_mean(&unit, b) > want {
        return Err(Error::Domain(format!("cannot reach mean load {mean}")));
    }
    for _ in 0..200 {
        let g = (a * b).sqrt();
        if powered_mean(&unit, g) > want {
            a = g;
        } else {
            b = g;
        }
    }
    let gamma = (a * b).sqrt();
    Ok(unit.iter().map(|u| min + (peak - min) * u.powf(gamma)).collect())
}

fn pv_year(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(DAYS * HOURS);
    for d in 0..DAYS {
        let phase = 2.0 * PI * (d as f64 - 172.0) / 365.0;
        let day_length = 12.15 + 1.85 * phase.cos();
        let noon = 13.0;
        let rise = noon - day_length / 2.0;
        let clear = 0.82 + 0.1 * phase.cos();
        let cloud = if rng.gen::<f64>() < 0.3 {
            0.25 + 0.5 * rng.gen::<f64>()
        } else {
            0.9 + 0.1 * rng.gen::<f64>()
        };
        for t in 0..HOURS {
            let mid = t as f64 + 0.5;
            let x = (mid - rise) / day_length;
            let v = if (0.0..=1.0).contains(&x) {
                clear * cloud * (PI * x).sin().powf(1.3)
            } else {
                0.0
            };
            out.push(v.clamp(0.0, 1.0));
        }
    }
    out
}

fn to_days(flat: &[f64]) -> Vec<DayProfile> {
    flat.chunks(HOURS)
        .map(|c| {
            let mut day = [0.0; HOURS];
            day.copy_from_slice(c);
            day
        })
        .collect()
}

/// Full-year profiles for `seed`.
pub fn synthetic_year(seed: u64, targets: LoadTargets) -> Result<Profiles> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let load = shape_load(&raw_load(&mut rng), targets)?;
    let pv = pv_year(&mut rng);
    Profiles::new(to_days(&load), to_days(&pv))
}
