//! Constructive starting points for the solver.
//!
//! Without storage the hours only interact through the DG rating, so for a
//! fixed PV size the cheapest dispatch is closed form: run the DG on the net
//! load (never below its floor) and curtail the rest. Searching over the PV
//! size then gives a near-optimal benchmark plan in milliseconds, which
//! matters at 365-day resolution where the solver's own first incumbent can
//! be very poor.
//!
//! Storage models are seeded by fixing every binary from an earlier result
//! and solving the LP that remains.

use crate::error::Result;
use crate::exec::Execution;
use crate::milp::{MilpSolver, SolveOptions, VarKind};
use crate::scenario::{DgMinMode, Scenario};

use super::{SizingModel, SizingResult};

/// A feasible MGS plan.
#[derive(Debug, Clone, PartialEq)]
pub struct MgsPlan {
    pub s_pv: f64,
    pub p_dg_max: f64,
    pub p_dg: Vec<f64>,
    pub p_curt: Vec<f64>,
    pub u_dg: Vec<f64>,
    /// Objective value of the plan.
    pub cost: f64,
}

fn pv_coefficient(sc: &Scenario) -> f64 {
    let p = &sc.params;
    p.pv_capital + p.planning_years * p.pv_rep_frac * p.pv_capital * p.pv_deg_rate
}

/// Cheapest dispatch for PV size `s_pv`, or `None` if some hour cannot be
/// balanced (load below the DG floor and above the available PV).
pub fn mgs_plan(sc: &Scenario, s_pv: f64) -> Option<MgsPlan> {
    let p = &sc.params;
    let prof = &sc.profiles;
    let n = prof.periods();
    let (mut p_dg, mut p_curt, mut u_dg) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut running = 0.0;
    for d in 0..prof.days() {
        for t in 0..prof.hours() {
            let load = prof.load_at(d, t);
            let avail = prof.pv_at(d, t) * s_pv;
            let net = load - avail;
            let on = net > 0.0 || sc.dg_min_mode == DgMinMode::Strict;
            let power = if on { net.max(p.dg_pmin) } else { 0.0 };
            // any output above the load would have to be curtailed PV
            if power > load + 1e-12 || power > sc.big_m {
                return None;
            }
            p_dg.push(power);
            p_curt.push((power - net).max(0.0));
            u_dg.push(if on { 1.0 } else { 0.0 });
            running += p.dg_op_cost * power + if on { p.dg_noload_cost } else { 0.0 };
        }
    }
    let p_dg_max = p_dg.iter().copied().fold(0.0, f64::max);
    let cost = pv_coefficient(sc) * s_pv + p.dg_capital * p_dg_max + sc.horizon_scale() * running;
    Some(MgsPlan {
        s_pv,
        p_dg_max,
        p_dg,
        p_curt,
        u_dg,
        cost,
    })
}

/// Best plan over a grid of PV sizes, refined around the grid optimum.
pub fn mgs_start(sc: &Scenario, exec: Execution) -> Option<MgsPlan> {
    let prof = &sc.profiles;
    let pv_energy: f64 = prof.pv_unit().iter().sum();
    let load_energy: f64 = prof.load().iter().sum();
    // PV producing twice the load energy is far past the economic size
    let upper = if pv_energy > 0.0 {
        2.0 * load_energy / pv_energy
    } else {
        0.0
    };
    let cost_at = |s: f64| mgs_plan(sc, s).map_or(f64::INFINITY, |p| p.cost);

    const GRID: usize = 64;
    let step = upper / GRID as f64;
    let grid = exec.map_range(0..GRID + 1, |i| (i as f64 * step, cost_at(i as f64 * step)));
    let (mut best_s, mut best) = grid
        .iter()
        .copied()
        .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if !best.is_finite() {
        return None;
    }
    let mut width = step;
    for _ in 0..6 {
        let probes = exec.map_range(0..17, |i| {
            let s = (best_s - width + width * i as f64 / 8.0).max(0.0);
            (s, cost_at(s))
        });
        for (s, c) in probes {
            if c < best {
                (best_s, best) = (s, c);
            }
        }
        width /= 8.0;
    }
    mgs_plan(sc, best_s)
}

impl MgsPlan {
    /// Full assignment for `sm`, with any storage left empty.
    pub fn values(&self, sm: &SizingModel) -> Vec<f64> {
        let mut x = vec![0.0; sm.model.num_vars()];
        let v = &sm.vars;
        x[v.s_pv.index()] = self.s_pv;
        x[v.p_dg_max.index()] = self.p_dg_max;
        for i in 0..self.p_dg.len() {
            x[v.p_dg[i].index()] = self.p_dg[i];
            x[v.p_curt[i].index()] = self.p_curt[i];
            x[v.u_dg[i].index()] = self.u_dg[i];
        }
        x
    }
}

/// Storage-model start derived from `base`: the DG keeps its commitment,
/// the battery may charge in hours where `base` had surplus PV and
/// discharge in all others. Sizes and dispatch then come from the LP with
/// those binaries fixed. `None` if `sm` has no storage or the LP has no
/// solution.
pub fn storage_start(
    sm: &SizingModel,
    base: &SizingResult,
    solver: &dyn MilpSolver,
    opts: &SolveOptions,
) -> Result<Option<Vec<f64>>> {
    let Some(st) = &sm.vars.storage else {
        return Ok(None);
    };
    if base.dispatch.len() != st.u_chg.len() {
        return Ok(None);
    }
    let mut fixed = vec![None; sm.model.num_vars()];
    for (i, row) in base.dispatch.iter().enumerate() {
        let surplus = row.pv_unit * base.sizes.pv > row.load;
        fixed[sm.vars.u_dg[i].index()] = Some(row.u_dg.round());
        fixed[st.u_chg[i].index()] = Some(if surplus { 1.0 } else { 0.0 });
        fixed[st.u_dchg[i].index()] = Some(if surplus { 0.0 } else { 1.0 });
    }
    let lp = sm.model.with_fixed(|id, v| {
        debug_assert!(fixed[id.index()].is_none() || v.kind == VarKind::Binary);
        fixed[id.index()]
    });
    let solution = solver.solve(&lp, opts, None)?;
    Ok(solution.status.has_solution().then_some(solution.values))
}
