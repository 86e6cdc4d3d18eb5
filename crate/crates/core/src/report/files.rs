use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{DgMinMode, ScenarioParams};
use crate::sizing::{DispatchRow, SizingResult};

/// Everything `verify` needs besides the traces: resolved parameters and
/// the decoded sizes of each model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub resolution: String,
    pub alpha: f64,
    pub days: usize,
    /// Periods per day.
    pub hours: usize,
    pub big_m: f64,
    pub dg_min_mode: String,
    pub solver: String,
    pub params: ScenarioParams,
    pub models: Vec<ManifestModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ipoc: Option<ManifestIpoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestModel {
    pub kind: String,
    pub status: String,
    /// As reported by the solver.
    pub objective: f64,
    pub mip_gap: f64,
    pub deg_factor: f64,
    pub dg_size: f64,
    pub pv_size: f64,
    pub bess_size: f64,
    pub e_init: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestIpoc {
    pub termination: String,
    /// 1-based iteration reported as the answer.
    pub selected: usize,
    pub iterations: usize,
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Integrity(format!("manifest: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Verify(format!("{}: {e}", path.display())))
    }
}

pub(crate) fn mode_label(mode: DgMinMode) -> &'static str {
    match mode {
        DgMinMode::Committed => "committed",
        DgMinMode::Strict => "strict",
    }
}

pub(crate) fn parse_mode(s: &str) -> Option<DgMinMode> {
    match s {
        "committed" => Some(DgMinMode::Committed),
        "strict" => Some(DgMinMode::Strict),
        _ => None,
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DispatchRecord {
    day: usize,
    hour: usize,
    load: f64,
    pv_unit: f64,
    pv_available: f64,
    p_dg: f64,
    p_curt: f64,
    p_chg: f64,
    p_dchg: f64,
    u_dg: f64,
    u_chg: f64,
    u_dchg: f64,
}

pub(crate) fn write_dispatch(path: &Path, result: &SizingResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in &result.dispatch {
        w.serialize(DispatchRecord {
            day: r.day,
            hour: r.hour,
            load: r.load,
            pv_unit: r.pv_unit,
            pv_available: r.pv_unit * result.sizes.pv,
            p_dg: r.p_dg,
            p_curt: r.p_curt,
            p_chg: r.p_chg,
            p_dchg: r.p_dchg,
            u_dg: r.u_dg,
            u_chg: r.u_chg,
            u_dchg: r.u_dchg,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn read_dispatch(path: &Path) -> Result<Vec<DispatchRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize::<DispatchRecord>()
        .map(|rec| {
            let d = rec?;
            Ok(DispatchRow {
                day: d.day,
                hour: d.hour,
                load: d.load,
                pv_unit: d.pv_unit,
                p_dg: d.p_dg,
                p_curt: d.p_curt,
                p_chg: d.p_chg,
                p_dchg: d.p_dchg,
                u_dg: d.u_dg,
                u_chg: d.u_chg,
                u_dchg: d.u_dchg,
            })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct SocRecord {
    day: usize,
    hour: usize,
    energy: f64,
    soc: f64,
}

/// Initial level as day 0, hour 0, then one row per period.
pub(crate) fn write_soc(path: &Path, result: &SizingResult) -> Result<()> {
    let cap = result.sizes.bess;
    let frac = |e: f64| if cap > 0.0 { e / cap } else { 0.0 };
    let mut w = csv::Writer::from_path(path)?;
    w.serialize(SocRecord {
        day: 0,
        hour: 0,
        energy: result.e_init,
        soc: frac(result.e_init),
    })?;
    for (r, &e) in result.dispatch.iter().zip(&result.soc) {
        w.serialize(SocRecord {
            day: r.day,
            hour: r.hour,
            energy: e,
            soc: frac(e),
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `(e_init, per-period levels)`.
pub(crate) fn read_soc(path: &Path) -> Result<(f64, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path)?;
    let records: Vec<SocRecord> = r.deserialize().collect::<std::result::Result<_, _>>()?;
    let (first, rest) = records
        .split_first()
        .ok_or_else(|| Error::Verify(format!("{} is empty", path.display())))?;
    if first.day != 0 || first.hour != 0 {
        return Err(Error::Verify(format!("{} lacks the initial row", path.display())));
    }
    Ok((first.energy, rest.iter().map(|s| s.energy).collect()))
}
