use crate::degradation::deg_factor;
use crate::error::{Error, Result};
use crate::milp::{ConstraintSense, LinearExpr, MilpModel, VarId};
use crate::scenario::{DgMinMode, Scenario};

use super::ModelKind;

use ConstraintSense::{Eq, Ge, Le};

/// Variables of the storage-free part shared by all three models.
#[derive(Debug, Clone)]
pub struct SizingVars {
    pub p_dg_max: VarId,
    pub s_pv: VarId,
    /// Per period, indexed `day * 24 + hour`.
    pub p_dg: Vec<VarId>,
    pub p_curt: Vec<VarId>,
    pub u_dg: Vec<VarId>,
    pub storage: Option<StorageVars>,
}

#[derive(Debug, Clone)]
pub struct StorageVars {
    pub s_bess: VarId,
    pub e_init: VarId,
    pub energy: Vec<VarId>,
    pub p_chg: Vec<VarId>,
    pub p_dchg: Vec<VarId>,
    pub u_chg: Vec<VarId>,
    pub u_dchg: Vec<VarId>,
}

/// A built sizing MILP together with the handles needed to decode it.
#[derive(Debug, Clone)]
pub struct SizingModel {
    pub kind: ModelKind,
    pub model: MilpModel,
    pub vars: SizingVars,
    /// BESS degradation penalty per discharged MWh (zero unless MGS-NIB).
    pub deg_factor: f64,
}

fn tag(d: usize, t: usize) -> String {
    format!("{}_{}", d + 1, t + 1)
}

struct Builder<'a> {
    sc: &'a Scenario,
    model: MilpModel,
    objective: LinearExpr,
}

impl<'a> Builder<'a> {
    fn new(sc: &'a Scenario) -> Self {
        Self {
            sc,
            model: MilpModel::new(),
            objective: LinearExpr::new(),
        }
    }

    /// Variables, objective terms and constraints common to every model,
    /// except the power balance, which depends on storage.
    fn generation(&mut self) -> Result<SizingVars> {
        let p = &self.sc.params;
        let prof = &self.sc.profiles;
        let scale = self.sc.horizon_scale();
        let m = &mut self.model;

        let p_dg_max = m.continuous("p_dg_max", 0.0)?;
        let s_pv = m.continuous("s_pv", 0.0)?;
        let n = prof.periods();
        let mut p_dg = Vec::with_capacity(n);
        let mut p_curt = Vec::with_capacity(n);
        let mut u_dg = Vec::with_capacity(n);
        for d in 0..prof.days() {
            for t in 0..prof.hours() {
                let k = tag(d, t);
                p_dg.push(m.continuous(format!("p_dg_{k}"), 0.0)?);
                p_curt.push(m.continuous(format!("p_curt_{k}"), 0.0)?);
                u_dg.push(m.binary(format!("u_dg_{k}"))?);
            }
        }

        for i in 0..n {
            self.objective.add_term(p_dg[i], scale * p.dg_op_cost);
            self.objective.add_term(u_dg[i], scale * p.dg_noload_cost);
        }
        self.objective.add_term(p_dg_max, p.dg_capital);
        // capital once, plus the per-annum PV degradation cost for every
        // planning year; it does not depend on how many days are represented
        let pv_deg_per_mw = p.pv_rep_frac * p.pv_capital * p.pv_deg_rate;
        self.objective
            .add_term(s_pv, p.pv_capital + p.planning_years * pv_deg_per_mw);

        let big_m = self.sc.big_m;
        for d in 0..prof.days() {
            for t in 0..prof.hours() {
                let i = d * prof.hours() + t;
                let k = tag(d, t);
                let pv = prof.pv_at(d, t);
                m.add_constraint(
                    format!("curt_{k}"),
                    LinearExpr::new().term(p_curt[i], 1.0).term(s_pv, -pv),
                    Le,
                    0.0,
                )?;
                match self.sc.dg_min_mode {
                    DgMinMode::Committed => m.add_constraint(
                        format!("dgmin_{k}"),
                        LinearExpr::new().term(p_dg[i], 1.0).term(u_dg[i], -p.dg_pmin),
                        Ge,
                        0.0,
                    )?,
                    DgMinMode::Strict => m.add_constraint(format!("dgmin_{k}"), p_dg[i].into(), Ge, p.dg_pmin)?,
                }
                m.add_constraint(
                    format!("dgon_{k}"),
                    LinearExpr::new().term(p_dg[i], 1.0).term(u_dg[i], -big_m),
                    Le,
                    0.0,
                )?;
                m.add_constraint(
                    format!("dgcap_{k}"),
                    LinearExpr::new().term(p_dg[i], 1.0).term(p_dg_max, -1.0),
                    Le,
                    0.0,
                )?;
            }
        }
        Ok(SizingVars {
            p_dg_max,
            s_pv,
            p_dg,
            p_curt,
            u_dg,
            storage: None,
        })
    }

    fn balance(&mut self, vars: &SizingVars) -> Result<()> {
        let prof = &self.sc.profiles;
        for d in 0..prof.days() {
            for t in 0..prof.hours() {
                let i = d * prof.hours() + t;
                let mut e = LinearExpr::new()
                    .term(vars.p_dg[i], 1.0)
                    .term(vars.p_curt[i], -1.0)
                    .term(vars.s_pv, prof.pv_at(d, t));
                if let Some(st) = &vars.storage {
                    e.add_term(st.p_chg[i], -1.0);
                    e.add_term(st.p_dchg[i], 1.0);
                }
                self.model
                    .add_constraint(format!("bal_{}", tag(d, t)), e, Eq, prof.load_at(d, t))?;
            }
        }
        Ok(())
    }

    fn storage(&mut self) -> Result<StorageVars> {
        let p = &self.sc.params;
        let prof = &self.sc.profiles;
        let m = &mut self.model;
        let n = prof.periods();

        let s_bess = m.continuous("s_bess", 0.0)?;
        let e_init = m.continuous("e_init", 0.0)?;
        let mut energy = Vec::with_capacity(n);
        let mut p_chg = Vec::with_capacity(n);
        let mut p_dchg = Vec::with_capacity(n);
        let mut u_chg = Vec::with_capacity(n);
        let mut u_dchg = Vec::with_capacity(n);
        for d in 0..prof.days() {
            for t in 0..prof.hours() {
                let k = tag(d, t);
                energy.push(m.continuous(format!("e_bess_{k}"), 0.0)?);
                p_chg.push(m.continuous(format!("p_chg_{k}"), 0.0)?);
                p_dchg.push(m.continuous(format!("p_dchg_{k}"), 0.0)?);
                u_chg.push(m.binary(format!("u_chg_{k}"))?);
                u_dchg.push(m.binary(format!("u_dchg_{k}"))?);
            }
        }
        self.objective.add_term(s_bess, p.bess_capital);

        let window = |m: &mut MilpModel, name: String, level: VarId| -> Result<()> {
            m.add_constraint(
                format!("{name}_lo"),
                LinearExpr::new().term(level, 1.0).term(s_bess, -p.soc_min),
                Ge,
                0.0,
            )?;
            m.add_constraint(
                format!("{name}_hi"),
                LinearExpr::new().term(level, 1.0).term(s_bess, -p.soc_max),
                Le,
                0.0,
            )
        };
        window(m, "init".into(), e_init)?;

        let big_m = self.sc.big_m;
        let chained_year = !prof.resolution().anchors_daily();
        for d in 0..prof.days() {
            for t in 0..prof.hours() {
                let i = d * prof.hours() + t;
                let k = tag(d, t);
                window(m, format!("soc_{k}"), energy[i])?;
                m.add_constraint(
                    format!("excl_{k}"),
                    LinearExpr::new().term(u_chg[i], 1.0).term(u_dchg[i], 1.0),
                    Le,
                    1.0,
                )?;
                m.add_constraint(
                    format!("chgon_{k}"),
                    LinearExpr::new().term(p_chg[i], 1.0).term(u_chg[i], -big_m),
                    Le,
                    0.0,
                )?;
                m.add_constraint(
                    format!("chgcap_{k}"),
                    LinearExpr::new().term(p_chg[i], 1.0).term(s_bess, -1.0 / p.t_chg),
                    Le,
                    0.0,
                )?;
                m.add_constraint(
                    format!("dchgon_{k}"),
                    LinearExpr::new().term(p_dchg[i], 1.0).term(u_dchg[i], -big_m),
                    Le,
                    0.0,
                )?;
                m.add_constraint(
                    format!("dchgcap_{k}"),
                    LinearExpr::new().term(p_dchg[i], 1.0).term(s_bess, -1.0 / p.t_dchg),
                    Le,
                    0.0,
                )?;

                // E[d,t] = prev + eta * chg - dchg
                let prev = if t > 0 || (chained_year && d > 0) {
                    energy[i - 1]
                } else {
                    e_init
                };
                m.add_constraint(
                    format!("energy_{k}"),
                    LinearExpr::new()
                        .term(energy[i], 1.0)
                        .term(prev, -1.0)
                        .term(p_chg[i], -p.eta)
                        .term(p_dchg[i], 1.0),
                    Eq,
                    0.0,
                )?;
            }
            if !chained_year {
                m.add_constraint(
                    format!("anchor_{}", d + 1),
                    LinearExpr::new()
                        .term(energy[(d + 1) * prof.hours() - 1], 1.0)
                        .term(e_init, -1.0),
                    Eq,
                    0.0,
                )?;
            }
        }
        if chained_year {
            m.add_constraint(
                "anchor_year",
                LinearExpr::new().term(energy[n - 1], 1.0).term(e_init, -1.0),
                Eq,
                0.0,
            )?;
        }
        Ok(StorageVars {
            s_bess,
            e_init,
            energy,
            p_chg,
            p_dchg,
            u_chg,
            u_dchg,
        })
    }

    fn finish(mut self, kind: ModelKind, vars: SizingVars, deg_factor: f64) -> Result<SizingModel> {
        self.model.set_objective(self.objective)?;
        Ok(SizingModel {
            kind,
            model: self.model,
            vars,
            deg_factor,
        })
    }
}

/// Benchmark model: DG and PV only.
pub fn build_mgs(sc: &Scenario) -> Result<SizingModel> {
    let mut b = Builder::new(sc);
    let vars = b.generation()?;
    b.balance(&vars)?;
    b.finish(ModelKind::Mgs, vars, 0.0)
}

/// DG and PV plus a battery whose cycling is free.
pub fn build_mgs_ib(sc: &Scenario) -> Result<SizingModel> {
    let mut b = Builder::new(sc);
    let mut vars = b.generation()?;
    vars.storage = Some(b.storage()?);
    b.balance(&vars)?;
    b.finish(ModelKind::MgsIb, vars, 0.0)
}

/// As [`build_mgs_ib`], with every discharged MWh charged `deg_factor`.
pub fn build_mgs_nib(sc: &Scenario, deg_factor: f64) -> Result<SizingModel> {
    if !(deg_factor >= 0.0 && deg_factor.is_finite()) {
        return Err(Error::Domain(format!(
            "degradation factor must be finite and >= 0, got {deg_factor}"
        )));
    }
    let mut b = Builder::new(sc);
    let mut vars = b.generation()?;
    let storage = b.storage()?;
    let scale = sc.horizon_scale();
    for &v in &storage.p_dchg {
        b.objective.add_term(v, scale * deg_factor);
    }
    vars.storage = Some(storage);
    b.balance(&vars)?;
    b.finish(ModelKind::MgsNib, vars, deg_factor)
}

/// Build `kind`; MGS-NIB uses the penalty at the scenario's nominal DOD.
pub fn build(kind: ModelKind, sc: &Scenario) -> Result<SizingModel> {
    match kind {
        ModelKind::Mgs => build_mgs(sc),
        ModelKind::MgsIb => build_mgs_ib(sc),
        ModelKind::MgsNib => {
            let delta = deg_factor(&sc.params, &sc.curve, sc.params.dod_nominal)?;
            build_mgs_nib(sc, delta)
        }
    }
}

impl SizingModel {
    /// Start vector for this model built from another model's solution by
    /// matching variable names; variables absent from the source are zero.
    ///
    /// Zero storage embeds an MGS solution into either storage model, so the
    /// seeded incumbent is never worse than the source objective.
    pub fn start_from(&self, source: &SizingModel, values: &[f64]) -> Vec<f64> {
        self.model
            .vars()
            .iter()
            .map(|v| source.model.var_by_name(&v.name).map_or(0.0, |id| values[id.index()]))
            .collect()
    }
}
