//! Iterative post-optimization correction of the battery degradation cost.
//!
//! MGS-NIB prices every discharged MWh at the factor for one nominal DOD.
//! After each solve the SOC trace is rainflow counted, the modeled penalty is
//! swapped for the cycle-resolved cost, and the model is re-solved with the
//! factor at the average counted DOD. Corrections are reported as
//! `modeled − actual`, so a positive value means the MILP over-charged.

use crate::degradation::{self, average_dod, count_result_cycles, CycleCount, DegFactorTable};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::milp::{MilpSolver, SolveOptions};
use crate::scenario::Scenario;
use crate::sizing::{build_mgs_nib, solve_sizing, SizingModel, SizingResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpocOptions {
    pub max_iter: usize,
    /// Relative objective tolerance for convergence.
    pub obj_tol: f64,
    pub n_bins: usize,
    pub solve: SolveOptions,
    pub exec: Execution,
}

impl Default for IpocOptions {
    fn default() -> Self {
        Self {
            max_iter: 10,
            obj_tol: 1e-4,
            n_bins: degradation::DEFAULT_BINS,
            solve: SolveOptions::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IpocIteration {
    /// 1-based.
    pub index: usize,
    /// Penalty DOD used for this solve.
    pub dod_used: f64,
    pub deg_factor_used: f64,
    /// Throughput-priced degradation in the solver objective, horizon total.
    pub modeled_deg_cost: f64,
    /// Cycle-resolved degradation, horizon total.
    pub actual_deg_cost: f64,
    /// `modeled − actual`.
    pub correction: f64,
    pub corrected_objective: f64,
    pub counts: CycleCount,
    /// Average counted DOD, `None` when the battery never cycled.
    pub average_dod: Option<f64>,
    pub sizing: SizingResult,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    DodRepeated,
    Converged,
    MaxIterations,
    BatteryUnused,
    /// A later solve failed; the iterations before it are kept.
    SolveFailed(String),
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::DodRepeated => "DodRepeated",
            Termination::Converged => "Converged",
            Termination::MaxIterations => "MaxIterations",
            Termination::BatteryUnused => "BatteryUnused",
            Termination::SolveFailed(_) => "SolveFailed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct IpocReport {
    pub iterations: Vec<IpocIteration>,
    pub termination: Termination,
    /// Index into `iterations` of the lowest corrected objective.
    pub selected: usize,
}

impl IpocReport {
    pub fn selected_iteration(&self) -> &IpocIteration {
        &self.iterations[self.selected]
    }
}

const DOD_EPS: f64 = 1e-9;

/// How the first solve of the loop is obtained.
pub enum IpocStart<'a> {
    Cold,
    /// Warm-start from another model's solution, matched by variable name.
    WarmFrom(&'a SizingModel, &'a [f64]),
    /// Reuse an MGS-NIB result already solved at the nominal DOD, with its
    /// raw variable values.
    Solved(Box<SizingResult>, Vec<f64>),
}

/// Evaluate one solved MGS-NIB result against its cycle count.
pub fn assess(
    sc: &Scenario,
    sizing: SizingResult,
    index: usize,
    dod_used: f64,
    n_bins: usize,
    exec: Execution,
) -> Result<IpocIteration> {
    let table = DegFactorTable::new(&sc.params, &sc.curve, n_bins)?;
    let counts = count_result_cycles(&sizing, sc.profiles.resolution(), n_bins, exec)?;
    let per_day = degradation::actual_deg_cost(&counts, &table, sizing.sizes.bess)?;
    let actual = sc.horizon_scale() * per_day;
    let modeled = sizing.costs.bess_deg;
    let correction = modeled - actual;
    Ok(IpocIteration {
        index,
        dod_used,
        deg_factor_used: sizing.deg_factor,
        modeled_deg_cost: modeled,
        actual_deg_cost: actual,
        correction,
        corrected_objective: sizing.objective - modeled + actual,
        average_dod: average_dod(&counts),
        counts,
        sizing,
    })
}

/// Run the correction loop starting from the scenario's nominal DOD.
///
/// Each solve after the first starts from the previous solution, which stays
/// feasible because only objective coefficients change.
pub fn run_ipoc(
    sc: &Scenario,
    solver: &dyn MilpSolver,
    opts: &IpocOptions,
    first: IpocStart<'_>,
) -> Result<IpocReport> {
    if opts.max_iter == 0 {
        return Err(Error::Domain("max_iter must be at least 1".into()));
    }
    let mut iterations: Vec<IpocIteration> = Vec::new();
    let mut used = Vec::new();
    let mut dod = sc.params.dod_nominal;
    let mut start: Option<Vec<f64>> = None;
    let mut first = Some(first);
    let termination = loop {
        let delta = degradation::deg_factor(&sc.params, &sc.curve, dod)?;
        let solved = match first.take() {
            Some(IpocStart::Solved(result, values)) => {
                if (result.deg_factor - delta).abs() > 1e-9 * delta.max(1.0) {
                    return Err(Error::Domain(format!(
                        "pre-solved result uses factor {} but the nominal DOD needs {delta}",
                        result.deg_factor
                    )));
                }
                Ok((*result, values))
            }
            seed => {
                let sm = build_mgs_nib(sc, delta)?;
                let warm = match (&start, seed) {
                    (Some(x), _) => Some(x.clone()),
                    (None, Some(IpocStart::WarmFrom(src, x))) => Some(sm.start_from(src, x)),
                    _ => None,
                };
                solve_sizing(&sm, sc, solver, &opts.solve, warm.as_deref())
            }
        };
        let (sizing, values) = match solved {
            Ok(s) => s,
            Err(e) if iterations.is_empty() => return Err(e),
            Err(e) => break Termination::SolveFailed(e.to_string()),
        };
        start = Some(values);
        used.push(dod);
        let it = assess(sc, sizing, iterations.len() + 1, dod, opts.n_bins, opts.exec)?;
        let prev = iterations.last().map(|p| p.corrected_objective);
        let next = it.average_dod;
        let corrected = it.corrected_objective;
        let no_correction = it.correction.abs() <= opts.obj_tol * corrected.abs();
        iterations.push(it);

        let installed = iterations[iterations.len() - 1].sizing.sizes.bess > degradation::MIN_RANGE;
        let Some(next) = next.filter(|_| installed) else {
            break Termination::BatteryUnused;
        };
        let settled = prev.is_some_and(|p| (corrected - p).abs() <= opts.obj_tol * corrected.abs());
        if no_correction || settled {
            break Termination::Converged;
        }
        if used.iter().any(|&u| (u - next).abs() < DOD_EPS) {
            break Termination::DodRepeated;
        }
        if iterations.len() >= opts.max_iter {
            break Termination::MaxIterations;
        }
        dod = next;
    };
    let selected = iterations
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.corrected_objective.total_cmp(&b.1.corrected_objective))
        .map(|(i, _)| i)
        .expect("at least one iteration");
    Ok(IpocReport {
        iterations,
        termination,
        selected,
    })
}
