use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cost, efficiency, state-of-charge and horizon parameters of one planning
/// scenario. Defaults are the PV, natural-gas generator and LiFePO4 battery
/// figures of the reference case study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    /// DG fuel/operational cost, $/MWh.
    pub dg_op_cost: f64,
    /// DG no-load cost, $/h while committed.
    pub dg_noload_cost: f64,
    /// DG capital cost, $/MW.
    pub dg_capital: f64,
    /// PV capital cost, $/MW.
    pub pv_capital: f64,
    /// PV replacement cost as a fraction of capital.
    pub pv_rep_frac: f64,
    /// PV degradation rate per annum.
    pub pv_deg_rate: f64,
    /// BESS capital cost, $/MWh.
    pub bess_capital: f64,
    /// BESS replacement cost as a fraction of capital.
    pub bess_rep_frac: f64,
    /// Full-charge duration, h.
    pub t_chg: f64,
    /// Full-discharge duration, h.
    pub t_dchg: f64,
    /// Round-trip efficiency, applied on the charging side.
    pub eta: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    /// Depth of discharge priced by the initial degradation penalty.
    pub dod_nominal: f64,
    /// DG minimum output while committed, MW.
    pub dg_pmin: f64,
    pub planning_years: f64,
    /// Big-M constant, MW. `None` resolves to ten times the peak load.
    pub big_m: Option<f64>,
    /// Initial DG commitment. Accepted for completeness; no constraint uses it.
    pub dg_init_commitment: Option<f64>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            dg_op_cost: 44.75,
            dg_noload_cost: 5.25,
            dg_capital: 1_150_000.0,
            pv_capital: 1_450_000.0,
            pv_rep_frac: 0.41,
            pv_deg_rate: 0.01,
            bess_capital: 469_000.0,
            bess_rep_frac: 0.79,
            t_chg: 1.0,
            t_dchg: 1.0,
            eta: 0.9,
            soc_min: 0.1,
            soc_max: 0.9,
            dod_nominal: 0.8,
            dg_pmin: 0.02,
            planning_years: 25.0,
            big_m: None,
            dg_init_commitment: None,
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        field,
        reason: reason.into(),
    }
}

impl ScenarioParams {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let params: Self = toml::from_str(text).map_err(|e| Error::ParamFile {
            path: "<inline>".into(),
            reason: e.to_string(),
        })?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let params: Self = toml::from_str(&text).map_err(|e| Error::ParamFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("parameters serialize to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let costs = [
            ("dg_op_cost", self.dg_op_cost),
            ("dg_noload_cost", self.dg_noload_cost),
            ("dg_capital", self.dg_capital),
            ("pv_capital", self.pv_capital),
            ("pv_rep_frac", self.pv_rep_frac),
            ("pv_deg_rate", self.pv_deg_rate),
            ("bess_capital", self.bess_capital),
            ("bess_rep_frac", self.bess_rep_frac),
            ("dg_pmin", self.dg_pmin),
        ];
        for (field, value) in costs {
            if !value.is_finite() || value < 0.0 {
                return Err(invalid(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        if !(self.t_chg > 0.0 && self.t_chg.is_finite()) {
            return Err(invalid("t_chg", "must be > 0"));
        }
        if !(self.t_dchg > 0.0 && self.t_dchg.is_finite()) {
            return Err(invalid("t_dchg", "must be > 0"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        if !(0.0 <= self.soc_min && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            return Err(invalid(
                "soc_min",
                format!(
                    "need 0 <= soc_min < soc_max <= 1, got {} and {}",
                    self.soc_min, self.soc_max
                ),
            ));
        }
        if !(self.dod_nominal > 0.0 && self.dod_nominal <= 1.0) {
            return Err(invalid("dod_nominal", "must lie in (0, 1]"));
        }
        if !(self.planning_years >= 1.0 && self.planning_years.is_finite()) {
            return Err(invalid("planning_years", "must be >= 1"));
        }
        if let Some(m) = self.big_m {
            if !(m > 0.0 && m.is_finite()) {
                return Err(invalid("big_m", "must be finite and > 0"));
            }
        }
        Ok(())
    }
}
