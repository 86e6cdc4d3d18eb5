use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exec::Execution;

pub const HOURS: usize = 24;

/// Days of each month in the (non-leap) calendar year.
pub const MONTH_DAYS: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

/// 0-based month of a 0-based day-of-year.
pub fn month_of_day(day: usize) -> usize {
    let mut start = 0;
    for (m, len) in MONTH_DAYS.iter().enumerate() {
        if day < start + len {
            return m;
        }
        start += len;
    }
    panic!("day {day} outside the 365-day calendar")
}

/// Time-set granularity of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResolutionMode {
    Full365,
    Typical12,
    Single1,
}

impl ResolutionMode {
    pub fn days(self) -> usize {
        match self {
            ResolutionMode::Full365 => 365,
            ResolutionMode::Typical12 => 12,
            ResolutionMode::Single1 => 1,
        }
    }

    /// Repetitions of the represented day set per year.
    pub fn alpha(self) -> f64 {
        match self {
            ResolutionMode::Full365 => 1.0,
            ResolutionMode::Typical12 => 30.42,
            ResolutionMode::Single1 => 365.0,
        }
    }

    pub fn from_days(days: usize) -> Option<Self> {
        match days {
            365 => Some(ResolutionMode::Full365),
            12 => Some(ResolutionMode::Typical12),
            1 => Some(ResolutionMode::Single1),
            _ => None,
        }
    }

    /// Whether each represented day returns to the initial energy level.
    pub fn anchors_daily(self) -> bool {
        self != ResolutionMode::Full365
    }

    pub fn label(self) -> &'static str {
        match self {
            ResolutionMode::Full365 => "365day",
            ResolutionMode::Typical12 => "12day",
            ResolutionMode::Single1 => "1day",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "365day" | "365" | "full365" => Some(ResolutionMode::Full365),
            "12day" | "12" | "typical12" => Some(ResolutionMode::Typical12),
            "1day" | "1" | "single1" => Some(ResolutionMode::Single1),
            _ => None,
        }
    }
}

pub type DayProfile = [f64; HOURS];

/// Hourly load (MW) and per-MW PV output for a set of represented days.
///
/// Values are stored in period order, `day * hours + hour`. Days have 24
/// hours except in [`Profiles::short_day`] instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    load: Vec<f64>,
    pv_unit: Vec<f64>,
    hours: usize,
    resolution: ResolutionMode,
}

impl Profiles {
    pub fn new(load: Vec<DayProfile>, pv_unit: Vec<DayProfile>) -> Result<Self> {
        if load.len() != pv_unit.len() {
            return Err(Error::InvalidProfiles(format!(
                "load has {} days but pv has {}",
                load.len(),
                pv_unit.len()
            )));
        }
        let resolution = ResolutionMode::from_days(load.len())
            .ok_or_else(|| Error::InvalidProfiles(format!("{} days given; expected 365, 12 or 1", load.len())))?;
        Self::checked(load.concat(), pv_unit.concat(), HOURS, resolution)
    }

    /// A single represented day of `load.len()` periods (at most 24), with
    /// the one-day weighting. Meant for small hand-made instances.
    pub fn short_day(load: Vec<f64>, pv_unit: Vec<f64>) -> Result<Self> {
        let hours = load.len();
        if hours == 0 || hours > HOURS || pv_unit.len() != hours {
            return Err(Error::InvalidProfiles(format!(
                "a short day needs 1..=24 periods in both series, got {} and {}",
                hours,
                pv_unit.len()
            )));
        }
        Self::checked(load, pv_unit, hours, ResolutionMode::Single1)
    }

    fn checked(load: Vec<f64>, pv_unit: Vec<f64>, hours: usize, resolution: ResolutionMode) -> Result<Self> {
        for (i, (&l, &p)) in load.iter().zip(&pv_unit).enumerate() {
            let (d, t) = (i / hours, i % hours);
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::InvalidProfiles(format!(
                    "load at day {}, hour {} is {}",
                    d + 1,
                    t + 1,
                    l
                )));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProfiles(format!(
                    "pv at day {}, hour {} is {} (outside [0, 1])",
                    d + 1,
                    t + 1,
                    p
                )));
            }
        }
        Ok(Self {
            load,
            pv_unit,
            hours,
            resolution,
        })
    }

    /// Same load and PV shape repeated on every represented day.
    pub fn uniform(resolution: ResolutionMode, load: DayProfile, pv_unit: DayProfile) -> Result<Self> {
        let n = resolution.days();
        Self::new(vec![load; n], vec![pv_unit; n])
    }

    pub fn days(&self) -> usize {
        self.load.len() / self.hours
    }

    /// Periods per day.
    pub fn hours(&self) -> usize {
        self.hours
    }

    pub fn periods(&self) -> usize {
        self.load.len()
    }

    pub fn resolution(&self) -> ResolutionMode {
        self.resolution
    }

    pub fn alpha(&self) -> f64 {
        self.resolution.alpha()
    }

    /// All load values in period order.
    pub fn load(&self) -> &[f64] {
        &self.load
    }

    /// All PV values in period order.
    pub fn pv_unit(&self) -> &[f64] {
        &self.pv_unit
    }

    pub fn load_at(&self, day: usize, hour: usize) -> f64 {
        self.load[day * self.hours + hour]
    }

    pub fn pv_at(&self, day: usize, hour: usize) -> f64 {
        self.pv_unit[day * self.hours + hour]
    }

    pub fn peak_load(&self) -> f64 {
        self.load.iter().copied().fold(0.0, f64::max)
    }

    /// α-scaled load energy per year, MWh.
    pub fn annual_load_energy(&self) -> f64 {
        self.alpha() * self.load.iter().sum::<f64>()
    }

    /// Average the 365-day year down to representative days.
    ///
    /// Only a full year can be resampled. `Typical12` averages each calendar
    /// month hour by hour and `Single1` averages every day.
    pub fn resample(&self, mode: ResolutionMode, exec: Execution) -> Result<Profiles> {
        if self.resolution != ResolutionMode::Full365 {
            return Err(Error::Resample {
                from: self.resolution,
                to: mode,
            });
        }
        let groups: Vec<std::ops::Range<usize>> = match mode {
            ResolutionMode::Full365 => return Ok(self.clone()),
            ResolutionMode::Single1 => std::iter::once(0..365).collect(),
            ResolutionMode::Typical12 => {
                let mut start = 0;
                MONTH_DAYS
                    .iter()
                    .map(|len| {
                        let r = start..start + len;
                        start += len;
                        r
                    })
                    .collect()
            }
        };
        let mean_of = |series: &[f64], days: &std::ops::Range<usize>| {
            let mut out = [0.0; HOURS];
            for (t, slot) in out.iter_mut().enumerate() {
                let sum: f64 = days.clone().map(|d| series[d * HOURS + t]).sum();
                *slot = sum / days.len() as f64;
            }
            out
        };
        let load = exec.map(&groups, |g| mean_of(&self.load, g));
        let pv_unit = exec.map(&groups, |g| mean_of(&self.pv_unit, g));
        Profiles::new(load, pv_unit)
    }
}

/// Read one `day,hour,value` CSV into a dense day × hour matrix.
fn read_profile_csv(path: &Path) -> Result<Vec<DayProfile>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers()?.clone();
    let expected = ["day", "hour", "value"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::ProfileFormat {
            path: path.to_path_buf(),
            reason: format!(
                "header must be `day,hour,value`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut cells: BTreeMap<usize, [Option<f64>; HOURS]> = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let field = |k: usize| record.get(k).unwrap_or("");
        let bad = |reason: String| Error::ProfileFormat {
            path: path.to_path_buf(),
            reason: format!("line {line}: {reason}"),
        };
        let day: usize = field(0).parse().map_err(|_| bad(format!("bad day `{}`", field(0))))?;
        let hour: usize = field(1).parse().map_err(|_| bad(format!("bad hour `{}`", field(1))))?;
        let value: f64 = field(2).parse().map_err(|_| bad(format!("bad value `{}`", field(2))))?;
        if day == 0 || !(1..=HOURS).contains(&hour) {
            return Err(bad(format!("day {day} / hour {hour} out of range")));
        }
        if !value.is_finite() {
            return Err(Error::ProfileValue {
                path: path.to_path_buf(),
                day,
                hour,
                reason: format!("non-finite value {value}"),
            });
        }
        let slot = &mut cells.entry(day).or_insert([None; HOURS])[hour - 1];
        if slot.is_some() {
            return Err(Error::ProfileValue {
                path: path.to_path_buf(),
                day,
                hour,
                reason: "duplicate row".into(),
            });
        }
        *slot = Some(value);
    }
    if cells.is_empty() {
        return Err(Error::ProfileFormat {
            path: path.to_path_buf(),
            reason: "no data rows".into(),
        });
    }
    let mut out = Vec::with_capacity(cells.len());
    for (expected_day, (day, hours)) in (1..).zip(cells) {
        if day != expected_day {
            return Err(Error::ProfileFormat {
                path: path.to_path_buf(),
                reason: format!("days must be numbered 1..N without gaps; day {expected_day} missing"),
            });
        }
        let mut profile = [0.0; HOURS];
        for (t, v) in hours.iter().enumerate() {
            profile[t] = v.ok_or_else(|| Error::ProfileValue {
                path: path.to_path_buf(),
                day,
                hour: t + 1,
                reason: "missing hour".into(),
            })?;
        }
        out.push(profile);
    }
    Ok(out)
}

/// Load and validate a load/PV profile pair.
pub fn load_profiles(load_path: &Path, pv_path: &Path) -> Result<Profiles> {
    let load = read_profile_csv(load_path)?;
    let pv = read_profile_csv(pv_path)?;
    if load.len() != pv.len() {
        return Err(Error::InvalidProfiles(format!(
            "{} covers days 1..{} but {} covers days 1..{}",
            load_path.display(),
            load.len(),
            pv_path.display(),
            pv.len()
        )));
    }
    for (d, day) in load.iter().enumerate() {
        for (t, &v) in day.iter().enumerate() {
            if v < 0.0 {
                return Err(Error::ProfileValue {
                    path: load_path.to_path_buf(),
                    day: d + 1,
                    hour: t + 1,
                    reason: format!("negative load {v}"),
                });
            }
        }
    }
    for (d, day) in pv.iter().enumerate() {
        for (t, &v) in day.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ProfileValue {
                    path: pv_path.to_path_buf(),
                    day: d + 1,
                    hour: t + 1,
                    reason: format!("pv fraction {v} outside [0, 1]"),
                });
            }
        }
    }
    Profiles::new(load, pv)
}

/// Write a period-ordered series of 24-hour days as `day,hour,value`.
pub fn write_profile_csv(path: &Path, series: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["day", "hour", "value"])?;
    for (i, v) in series.iter().enumerate() {
        let (d, t) = (i / HOURS, i % HOURS);
        w.write_record([(d + 1).to_string(), (t + 1).to_string(), v.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
