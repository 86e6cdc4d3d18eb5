//! Re-evaluation of the sizing constraints directly from decoded dispatch.

use crate::scenario::{DgMinMode, Scenario};

use super::SizingResult;

/// Largest violation of each constraint family, MW or MWh.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Residuals {
    pub balance: f64,
    pub curtailment: f64,
    pub dg_min: f64,
    pub dg_cap: f64,
    pub soc_window: f64,
    pub exclusivity: f64,
    pub power_caps: f64,
    pub recursion: f64,
    pub anchoring: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [
            self.balance,
            self.curtailment,
            self.dg_min,
            self.dg_cap,
            self.soc_window,
            self.exclusivity,
            self.power_caps,
            self.recursion,
            self.anchoring,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn excess(x: f64) -> f64 {
    x.max(0.0)
}

pub fn replay(result: &SizingResult, sc: &Scenario) -> Residuals {
    let p = &sc.params;
    let big_m = sc.big_m;
    let s = result.sizes;
    let mut r = Residuals::default();
    for row in &result.dispatch {
        let avail = row.pv_unit * s.pv;
        let bal = row.p_dg + row.p_dchg - row.p_chg - row.load + avail - row.p_curt;
        r.balance = r.balance.max(bal.abs());
        r.curtailment = r.curtailment.max(excess(row.p_curt - avail)).max(excess(-row.p_curt));
        let floor = match sc.dg_min_mode {
            DgMinMode::Committed => p.dg_pmin * row.u_dg,
            DgMinMode::Strict => p.dg_pmin,
        };
        r.dg_min = r.dg_min.max(excess(floor - row.p_dg));
        r.dg_cap = r
            .dg_cap
            .max(excess(row.p_dg - s.dg))
            .max(excess(row.p_dg - big_m * row.u_dg));
        if result.has_storage() {
            r.exclusivity = r
                .exclusivity
                .max(excess(row.u_chg + row.u_dchg - 1.0))
                .max(excess(row.p_chg * row.p_dchg - 1e-9));
            r.power_caps = r
                .power_caps
                .max(excess(row.p_chg - big_m * row.u_chg))
                .max(excess(row.p_chg - s.bess / p.t_chg))
                .max(excess(row.p_dchg - big_m * row.u_dchg))
                .max(excess(row.p_dchg - s.bess / p.t_dchg));
        }
    }
    if !result.has_storage() {
        return r;
    }

    let lo = p.soc_min * s.bess;
    let hi = p.soc_max * s.bess;
    for &e in std::iter::once(&result.e_init).chain(&result.soc) {
        r.soc_window = r.soc_window.max(excess(lo - e)).max(excess(e - hi));
    }

    let daily = sc.profiles.resolution().anchors_daily();
    let mut level = result.e_init;
    for (i, row) in result.dispatch.iter().enumerate() {
        if row.hour == 1 && daily {
            level = result.e_init;
        }
        // replay from the simulated level, not the solver's, so drift accumulates
        level += p.eta * row.p_chg - row.p_dchg;
        r.recursion = r.recursion.max((level - result.soc[i]).abs());
        if row.hour == sc.profiles.hours() && daily {
            r.anchoring = r.anchoring.max((result.soc[i] - result.e_init).abs());
        }
    }
    if !daily {
        let last = *result.soc.last().expect("non-empty year");
        r.anchoring = (last - result.e_init).abs();
    }
    r
}
