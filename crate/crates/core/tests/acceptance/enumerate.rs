//! Brute-force optimum of a one-day instance: every commitment and storage
//! mode pattern, each leaving an LP over the continuous variables.

use gridsizer_core::scenario::ScenarioParams;
use gridsizer_core::sizing::ModelKind;

use super::simplex::{Lp, Rel};

pub struct Tiny {
    pub params: ScenarioParams,
    pub load: Vec<f64>,
    pub pv: Vec<f64>,
    pub big_m: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Idle,
    Charge,
    Discharge,
}

impl Tiny {
    /// A single represented day stands for the whole year.
    fn scale(&self) -> f64 {
        365.0 * self.params.planning_years
    }

    /// Degradation price per discharged MWh at 80 % DOD (3000 cycles).
    pub fn penalty(&self) -> f64 {
        self.params.bess_capital * self.params.bess_rep_frac / 3000.0
    }

    fn pattern(&self, kind: ModelKind, dg_on: &[bool], modes: Option<&[Mode]>) -> Option<f64> {
        let p = &self.params;
        let scale = self.scale();
        let mut lp = Lp::default();
        let dg_max = lp.var(p.dg_capital);
        let pv_per_mw = p.pv_capital + p.planning_years * p.pv_rep_frac * p.pv_capital * p.pv_deg_rate;
        let s_pv = lp.var(pv_per_mw);
        let store = modes.map(|_| (lp.var(p.bess_capital), lp.var(0.0)));
        let window = |lp: &mut Lp, level: usize, cap: usize| {
            lp.row(&[(level, 1.0), (cap, -p.soc_min)], Rel::Ge, 0.0);
            lp.row(&[(level, 1.0), (cap, -p.soc_max)], Rel::Le, 0.0);
        };

        let mut fixed = 0.0;
        let mut prev = store.map(|(_, e0)| e0);
        for t in 0..self.load.len() {
            let curt = lp.var(0.0);
            lp.row(&[(curt, 1.0), (s_pv, -self.pv[t])], Rel::Le, 0.0);
            let mut balance = vec![(s_pv, self.pv[t]), (curt, -1.0)];
            if dg_on[t] {
                fixed += scale * p.dg_noload_cost;
                let g = lp.var(scale * p.dg_op_cost);
                lp.row(&[(g, 1.0)], Rel::Ge, p.dg_pmin);
                lp.row(&[(g, 1.0)], Rel::Le, self.big_m);
                lp.row(&[(g, 1.0), (dg_max, -1.0)], Rel::Le, 0.0);
                balance.push((g, 1.0));
            }
            if let (Some((cap, _)), Some(modes), Some(before)) = (store, modes, prev) {
                let e = lp.var(0.0);
                window(&mut lp, e, cap);
                let mut step = vec![(e, 1.0), (before, -1.0)];
                match modes[t] {
                    Mode::Idle => {}
                    Mode::Charge => {
                        let c = lp.var(0.0);
                        lp.row(&[(c, 1.0)], Rel::Le, self.big_m);
                        lp.row(&[(c, 1.0), (cap, -1.0 / p.t_chg)], Rel::Le, 0.0);
                        balance.push((c, -1.0));
                        step.push((c, -p.eta));
                    }
                    Mode::Discharge => {
                        let price = if kind == ModelKind::MgsNib {
                            scale * self.penalty()
                        } else {
                            0.0
                        };
                        let dd = lp.var(price);
                        lp.row(&[(dd, 1.0)], Rel::Le, self.big_m);
                        lp.row(&[(dd, 1.0), (cap, -1.0 / p.t_dchg)], Rel::Le, 0.0);
                        balance.push((dd, 1.0));
                        step.push((dd, 1.0));
                    }
                }
                lp.row(&step, Rel::Eq, 0.0);
                prev = Some(e);
            }
            lp.row(&balance, Rel::Eq, self.load[t]);
        }
        if let (Some((cap, e0)), Some(last)) = (store, prev) {
            window(&mut lp, e0, cap);
            lp.row(&[(last, 1.0), (e0, -1.0)], Rel::Eq, 0.0);
        }
        lp.minimize().map(|v| v + fixed)
    }

    /// `(optimum, patterns tried)`.
    pub fn optimum(&self, kind: ModelKind) -> (Option<f64>, usize) {
        let n = self.load.len();
        let mut best: Option<f64> = None;
        let mut tried = 0;
        for bits in 0..1u32 << n {
            let dg_on: Vec<bool> = (0..n).map(|t| bits >> t & 1 == 1).collect();
            let mode_sets: Vec<Option<Vec<Mode>>> = if kind.has_storage() {
                // both flags set is excluded by the exclusivity row
                (0..3usize.pow(n as u32))
                    .map(|mut code| {
                        Some(
                            (0..n)
                                .map(|_| {
                                    let m = [Mode::Idle, Mode::Charge, Mode::Discharge][code % 3];
                                    code /= 3;
                                    m
                                })
                                .collect(),
                        )
                    })
                    .collect()
            } else {
                vec![None]
            };
            for modes in &mode_sets {
                tried += 1;
                if let Some(v) = self.pattern(kind, &dg_on, modes.as_deref()) {
                    best = Some(best.map_or(v, |b: f64| b.min(v)));
                }
            }
        }
        (best, tried)
    }
}
