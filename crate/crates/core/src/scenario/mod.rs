//! Scenario inputs: parameters, load/PV profiles and the cycle-life curve.

mod curve;
mod params;
mod profiles;

pub use curve::CycleLifeCurve;
pub use params::ScenarioParams;
pub use profiles::{
    load_profiles, month_of_day, write_profile_csv, DayProfile, Profiles, ResolutionMode, HOURS, MONTH_DAYS,
};

use crate::error::{Error, Result};

/// How the DG minimum-output constraint is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DgMinMode {
    /// `P_dg >= P_min * U_dg`: the floor applies only while committed.
    #[default]
    Committed,
    /// `P_dg >= P_min` in every period, regardless of commitment.
    Strict,
}

/// A validated parameter set bound to its profiles.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: ScenarioParams,
    pub profiles: Profiles,
    pub curve: CycleLifeCurve,
    /// Resolved big-M constant, MW.
    pub big_m: f64,
    pub dg_min_mode: DgMinMode,
}

impl Scenario {
    pub fn assemble(params: ScenarioParams, profiles: Profiles, curve: CycleLifeCurve) -> Result<Self> {
        params.validate()?;
        let peak = profiles.peak_load();
        let big_m = params.big_m.unwrap_or(10.0 * peak);
        if big_m < peak {
            return Err(Error::InvalidParam {
                field: "big_m",
                reason: format!("{big_m} is below the peak load {peak}"),
            });
        }
        // all-zero load: any positive M keeps the model well formed
        let big_m = if big_m > 0.0 { big_m } else { 1.0 };
        Ok(Self {
            params,
            profiles,
            curve,
            big_m,
            dg_min_mode: DgMinMode::Committed,
        })
    }

    pub fn with_dg_min_mode(mut self, mode: DgMinMode) -> Self {
        self.dg_min_mode = mode;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.profiles.alpha()
    }

    /// α · Y: multiplier turning represented-day sums into horizon totals.
    pub fn horizon_scale(&self) -> f64 {
        self.profiles.alpha() * self.params.planning_years
    }
}
