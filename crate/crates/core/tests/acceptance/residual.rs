//! Constraint residuals of a decoded result, evaluated from the scenario
//! inputs and the returned values alone.

use gridsizer_core::scenario::{DgMinMode, ResolutionMode, Scenario};
use gridsizer_core::sizing::SizingResult;

#[derive(Debug, Default)]
pub struct Check {
    pub worst: f64,
    pub at: String,
}

impl Check {
    fn le(&mut self, what: &str, i: usize, lhs: f64, rhs: f64) {
        self.note(what, i, (lhs - rhs).max(0.0));
    }

    fn eq(&mut self, what: &str, i: usize, lhs: f64, rhs: f64) {
        self.note(what, i, (lhs - rhs).abs());
    }

    fn note(&mut self, what: &str, i: usize, r: f64) {
        if r > self.worst || r.is_nan() {
            self.worst = if r.is_nan() { f64::INFINITY } else { r };
            self.at = format!("{what} at period {}", i + 1);
        }
    }

    fn binary(&mut self, what: &str, i: usize, u: f64) {
        self.note(what, i, u.abs().min((u - 1.0).abs()));
    }
}

/// Largest violation over balance, curtailment, DG limits, the storage
/// window, exclusivity, power caps, the energy recursion and anchoring.
pub fn residual(sc: &Scenario, r: &SizingResult) -> Check {
    let p = &sc.params;
    let m = sc.big_m;
    let hours = sc.profiles.hours();
    let mut c = Check::default();
    let s = r.sizes;
    for (name, v) in [
        ("dg size", s.dg),
        ("pv size", s.pv),
        ("bess size", s.bess),
        ("initial energy", r.e_init),
    ] {
        c.le(name, 0, 0.0, v);
    }
    let store = r.kind.has_storage();
    if store {
        c.le("initial soc floor", 0, p.soc_min * s.bess, r.e_init);
        c.le("initial soc ceiling", 0, r.e_init, p.soc_max * s.bess);
    }
    let chained = sc.profiles.resolution() == ResolutionMode::Full365;
    let n = r.dispatch.len();
    for (i, row) in r.dispatch.iter().enumerate() {
        let load = sc.profiles.load()[i];
        let pv = sc.profiles.pv_unit()[i] * s.pv;
        c.eq("load column", i, row.load, load);
        for (name, v) in [
            ("p_dg", row.p_dg),
            ("p_curt", row.p_curt),
            ("p_chg", row.p_chg),
            ("p_dchg", row.p_dchg),
        ] {
            c.le(name, i, 0.0, v);
        }
        c.eq("balance", i, row.p_dg + pv - row.p_curt - row.p_chg + row.p_dchg, load);
        c.le("curtailment", i, row.p_curt, pv);
        c.binary("u_dg", i, row.u_dg);
        let floor = match sc.dg_min_mode {
            DgMinMode::Committed => p.dg_pmin * row.u_dg,
            DgMinMode::Strict => p.dg_pmin,
        };
        c.le("dg floor", i, floor, row.p_dg);
        c.le("dg commitment", i, row.p_dg, m * row.u_dg);
        c.le("dg rating", i, row.p_dg, s.dg);
        if !store {
            c.eq("storage flows", i, row.p_chg.abs() + row.p_dchg.abs(), 0.0);
            continue;
        }
        c.binary("u_chg", i, row.u_chg);
        c.binary("u_dchg", i, row.u_dchg);
        c.le("exclusivity", i, row.u_chg + row.u_dchg, 1.0);
        c.le("simultaneous flows", i, row.p_chg * row.p_dchg, 0.0);
        c.le("charge switch", i, row.p_chg, m * row.u_chg);
        c.le("charge rate", i, row.p_chg, s.bess / p.t_chg);
        c.le("discharge switch", i, row.p_dchg, m * row.u_dchg);
        c.le("discharge rate", i, row.p_dchg, s.bess / p.t_dchg);
        let e = r.soc[i];
        c.le("soc floor", i, p.soc_min * s.bess, e);
        c.le("soc ceiling", i, e, p.soc_max * s.bess);
        let starts_day = i % hours == 0 && (!chained || i == 0);
        let before = if starts_day { r.e_init } else { r.soc[i - 1] };
        c.eq("energy recursion", i, e, before + p.eta * row.p_chg - row.p_dchg);
        let anchored = if chained { i == n - 1 } else { i % hours == hours - 1 };
        if anchored {
            c.eq("anchor", i, e, r.e_init);
        }
    }
    c
}

/// Objective rebuilt from sizes and dispatch.
pub fn objective(sc: &Scenario, r: &SizingResult) -> f64 {
    let p = &sc.params;
    let scale = sc.profiles.alpha() * p.planning_years;
    let running: f64 = r
        .dispatch
        .iter()
        .map(|d| p.dg_op_cost * d.p_dg + p.dg_noload_cost * d.u_dg + r.deg_factor * d.p_dchg)
        .sum();
    p.dg_capital * r.sizes.dg
        + p.pv_capital * r.sizes.pv
        + p.bess_capital * r.sizes.bess
        + p.planning_years * p.pv_rep_frac * p.pv_capital * p.pv_deg_rate * r.sizes.pv
        + scale * running
}
