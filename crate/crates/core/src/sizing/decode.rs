use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::milp::{Solution, SolveStatus, FEASIBILITY_TOL, INTEGRALITY_TOL};
use crate::scenario::{Scenario, ScenarioParams};

use super::{ModelKind, SizingModel};

/// Per-period operating point. `day` and `hour` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispatchRow {
    pub day: usize,
    pub hour: usize,
    pub load: f64,
    pub pv_unit: f64,
    pub p_dg: f64,
    pub p_curt: f64,
    pub p_chg: f64,
    pub p_dchg: f64,
    pub u_dg: f64,
    pub u_chg: f64,
    pub u_dchg: f64,
}

/// Installed capacities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sizes {
    /// MW
    pub dg: f64,
    /// MW
    pub pv: f64,
    /// MWh
    pub bess: f64,
}

/// Objective terms over the planning horizon, in currency units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub dg_capital: f64,
    pub pv_capital: f64,
    pub bess_capital: f64,
    pub dg_op_noload: f64,
    pub pv_deg: f64,
    pub bess_deg: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.dg_capital + self.pv_capital + self.bess_capital + self.dg_op_noload + self.pv_deg + self.bess_deg
    }

    /// Recompute every term from sizes and dispatch.
    pub fn from_dispatch(
        params: &ScenarioParams,
        alpha: f64,
        sizes: Sizes,
        dispatch: &[DispatchRow],
        deg_factor: f64,
    ) -> Self {
        let scale = alpha * params.planning_years;
        let op: f64 = dispatch
            .iter()
            .map(|r| r.p_dg * params.dg_op_cost + r.u_dg * params.dg_noload_cost)
            .sum();
        let discharged: f64 = dispatch.iter().map(|r| r.p_dchg).sum();
        Self {
            dg_capital: sizes.dg * params.dg_capital,
            pv_capital: sizes.pv * params.pv_capital,
            bess_capital: sizes.bess * params.bess_capital,
            dg_op_noload: scale * op,
            pv_deg: params.planning_years * crate::degradation::pv_deg_cost(params, sizes.pv),
            bess_deg: scale * deg_factor * discharged,
        }
    }
}

/// Energy aggregates per year (α × represented-day sums), MWh.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergySummary {
    pub total_load: f64,
    pub dg_energy: f64,
    pub pv_available: f64,
    pub pv_energy_used: f64,
    pub pv_curtailed: f64,
    pub bess_charge: f64,
    pub bess_discharge: f64,
}

impl EnergySummary {
    pub fn from_dispatch(alpha: f64, s_pv: f64, dispatch: &[DispatchRow]) -> Self {
        let mut e = EnergySummary::default();
        for r in dispatch {
            let avail = r.pv_unit * s_pv;
            e.total_load += r.load;
            e.dg_energy += r.p_dg;
            e.pv_available += avail;
            e.pv_energy_used += avail - r.p_curt;
            e.pv_curtailed += r.p_curt;
            e.bess_charge += r.p_chg;
            e.bess_discharge += r.p_dchg;
        }
        for v in [
            &mut e.total_load,
            &mut e.dg_energy,
            &mut e.pv_available,
            &mut e.pv_energy_used,
            &mut e.pv_curtailed,
            &mut e.bess_charge,
            &mut e.bess_discharge,
        ] {
            *v *= alpha;
        }
        e
    }

    /// Supply minus demand; zero up to round-off for a balanced dispatch.
    pub fn balance_gap(&self) -> f64 {
        self.dg_energy + self.pv_energy_used + self.bess_discharge - self.bess_charge - self.total_load
    }
}

/// Decoded optimum of one sizing model.
#[derive(Debug, Clone)]
pub struct SizingResult {
    pub kind: ModelKind,
    pub status: SolveStatus,
    pub mip_gap: f64,
    pub solve_seconds: f64,
    /// Objective reported by the solver.
    pub objective: f64,
    pub sizes: Sizes,
    pub deg_factor: f64,
    pub costs: CostBreakdown,
    pub energy: EnergySummary,
    /// Initial battery energy, MWh.
    pub e_init: f64,
    /// Battery energy at the end of each period, MWh (empty for MGS).
    pub soc: Vec<f64>,
    pub dispatch: Vec<DispatchRow>,
    pub alpha: f64,
    pub days: usize,
}

impl SizingResult {
    pub fn has_storage(&self) -> bool {
        self.kind.has_storage()
    }

    /// Periods per represented day.
    pub fn hours(&self) -> usize {
        self.dispatch.len() / self.days.max(1)
    }
}

/// Turn a solver assignment into a [`SizingResult`], checking it against
/// the model it came from.
pub fn decode(sm: &SizingModel, solution: &Solution, sc: &Scenario) -> Result<SizingResult> {
    match solution.status {
        SolveStatus::Optimal | SolveStatus::FeasibleGapLimited => {}
        SolveStatus::Infeasible | SolveStatus::Unbounded => return Err(Error::Infeasible(sm.kind.label().into())),
        SolveStatus::TimeLimit => return Err(Error::NoIncumbent(sm.kind.label().into())),
    }
    let x = &solution.values;
    if x.len() != sm.model.num_vars() {
        return Err(Error::Integrity(format!(
            "solution has {} values for {} variables",
            x.len(),
            sm.model.num_vars()
        )));
    }
    let (viol, row) = sm.model.max_violation(x, Execution::Parallel);
    if viol > FEASIBILITY_TOL {
        return Err(Error::Integrity(format!(
            "{}: `{}` violated by {viol:e}",
            sm.kind.label(),
            row.unwrap_or_default()
        )));
    }
    let int_viol = sm.model.max_integrality_violation(x);
    if int_viol > INTEGRALITY_TOL {
        return Err(Error::Integrity(format!(
            "{}: binary off integrality by {int_viol:e}",
            sm.kind.label()
        )));
    }

    let prof = &sc.profiles;
    let v = &sm.vars;
    let val = |id: crate::milp::VarId| x[id.index()];
    let mut dispatch = Vec::with_capacity(prof.periods());
    for d in 0..prof.days() {
        for t in 0..prof.hours() {
            let i = d * prof.hours() + t;
            let (p_chg, p_dchg, u_chg, u_dchg) = match &v.storage {
                Some(s) => (val(s.p_chg[i]), val(s.p_dchg[i]), val(s.u_chg[i]), val(s.u_dchg[i])),
                None => (0.0, 0.0, 0.0, 0.0),
            };
            dispatch.push(DispatchRow {
                day: d + 1,
                hour: t + 1,
                load: prof.load_at(d, t),
                pv_unit: prof.pv_at(d, t),
                p_dg: val(v.p_dg[i]),
                p_curt: val(v.p_curt[i]),
                p_chg,
                p_dchg,
                u_dg: val(v.u_dg[i]),
                u_chg,
                u_dchg,
            });
        }
    }
    let sizes = Sizes {
        dg: val(v.p_dg_max),
        pv: val(v.s_pv),
        bess: v.storage.as_ref().map_or(0.0, |s| val(s.s_bess)),
    };
    let (e_init, soc) = match &v.storage {
        Some(s) => (val(s.e_init), s.energy.iter().map(|&e| val(e)).collect()),
        None => (0.0, Vec::new()),
    };
    let alpha = sc.alpha();
    let costs = CostBreakdown::from_dispatch(&sc.params, alpha, sizes, &dispatch, sm.deg_factor);
    let total = costs.total();
    if (total - solution.objective_value).abs() > 1e-6 * solution.objective_value.abs().max(1.0) {
        return Err(Error::Integrity(format!(
            "{}: cost terms sum to {total} but the solver reports {}",
            sm.kind.label(),
            solution.objective_value
        )));
    }
    let energy = EnergySummary::from_dispatch(alpha, sizes.pv, &dispatch);
    Ok(SizingResult {
        kind: sm.kind,
        status: solution.status,
        mip_gap: solution.mip_gap,
        solve_seconds: solution.solve_seconds,
        objective: solution.objective_value,
        sizes,
        deg_factor: sm.deg_factor,
        costs,
        energy,
        e_init,
        soc,
        dispatch,
        alpha,
        days: prof.days(),
    })
}
