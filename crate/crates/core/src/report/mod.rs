//! Running the requested models and writing the comparison report.
//!
//! Output directory layout:
//!
//! | file                  | contents                                         |
//! |-----------------------|--------------------------------------------------|
//! | `costs.csv`           | status, objective and cost terms per model       |
//! | `sizes.csv`           | DG, PV and BESS sizes                            |
//! | `energy.csv`          | horizon energy totals                            |
//! | `ipoc.csv`            | one row per correction iteration (with `--ipoc`) |
//! | `dispatch_<model>.csv`| hourly operating points                          |
//! | `soc_<model>.csv`     | battery energy, initial row first                |
//! | `model_<model>.lp`    | the MILP in LP format                            |
//! | `manifest.toml`       | resolved inputs and decoded sizes                |
//! | `summary.txt`         | human-readable digest, including timings         |
//!
//! Everything except `summary.txt` is deterministic for a given input and
//! solver backend.

mod files;
mod tables;
mod verify;

pub use files::{Manifest, ManifestIpoc, ManifestModel};
pub use tables::{cost_table, energy_table, ipoc_table, size_table, Table, IPOC_HEADER};
pub use verify::{verify, VerifySummary};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ipoc::{run_ipoc, IpocOptions, IpocReport, IpocStart};
use crate::milp::{write_lp, MilpSolver, Solution, SolveOptions, SolveStatus, FEASIBILITY_TOL, INTEGRALITY_TOL};
use crate::scenario::{load_profiles, CycleLifeCurve, DgMinMode, ResolutionMode, Scenario, ScenarioParams};
use crate::sizing::{build, decode, mgs_start, storage_start, ModelKind, SizingModel, SizingResult};

/// Inputs of one `run`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub models: Vec<ModelKind>,
    pub resolution: ResolutionMode,
    pub load_path: PathBuf,
    pub pv_path: PathBuf,
    /// Defaults apply when absent.
    pub params_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub solve: SolveOptions,
    pub ipoc: Option<IpocOptions>,
    pub dg_min_mode: DgMinMode,
    /// Overrides the parameter file.
    pub big_m: Option<f64>,
    pub exec: Execution,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::InvalidParam {
                field: "model",
                reason: "no model selected".into(),
            });
        }
        if self.ipoc.is_some() && !self.models.contains(&ModelKind::MgsNib) {
            return Err(Error::InvalidParam {
                field: "ipoc",
                reason: "the correction loop needs MGS-NIB (use --model mgs-nib or all)".into(),
            });
        }
        Ok(())
    }
}

/// Parameters and profiles for `cfg`, resampled to the requested
/// resolution when the input is a full year.
pub fn load_scenario(cfg: &RunConfig) -> Result<Scenario> {
    let mut params = match &cfg.params_path {
        Some(p) => ScenarioParams::load(p)?,
        None => ScenarioParams::default(),
    };
    if cfg.big_m.is_some() {
        params.big_m = cfg.big_m;
    }
    let raw = load_profiles(&cfg.load_path, &cfg.pv_path)?;
    let profiles = if raw.resolution() == cfg.resolution {
        raw
    } else {
        raw.resample(cfg.resolution, cfg.exec)?
    };
    Ok(Scenario::assemble(params, profiles, CycleLifeCurve::default())?.with_dg_min_mode(cfg.dg_min_mode))
}

/// Solved models in reporting order plus the optional correction loop.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub scenario: Scenario,
    pub results: Vec<SizingResult>,
    pub ipoc: Option<IpocReport>,
    /// LP text of each solved model, reporting order.
    pub lp: Vec<(ModelKind, String)>,
    pub solver: String,
    pub build_seconds: Vec<(ModelKind, f64)>,
}

impl ComparisonReport {
    pub fn result(&self, kind: ModelKind) -> Option<&SizingResult> {
        self.results.iter().find(|r| r.kind == kind)
    }

    pub fn cost_table(&self) -> Table {
        cost_table(&self.results)
    }

    pub fn size_table(&self) -> Table {
        size_table(&self.results)
    }

    pub fn energy_table(&self) -> Table {
        energy_table(&self.results, self.scenario.params.planning_years)
    }
}

/// Check a start vector against the model.
fn start_is_feasible(sm: &SizingModel, start: &[f64]) -> bool {
    start.len() == sm.model.num_vars()
        && sm.model.max_violation(start, Execution::Parallel).0 <= FEASIBILITY_TOL
        && sm.model.max_integrality_violation(start) <= INTEGRALITY_TOL
}

/// Solve `sm`, falling back to `start` when the solver stops without
/// improving on it.
fn solve_seeded(
    sm: &SizingModel,
    sc: &Scenario,
    solver: &dyn MilpSolver,
    opts: &SolveOptions,
    start: Option<Vec<f64>>,
) -> Result<(SizingResult, Vec<f64>)> {
    let solution = solver.solve(&sm.model, opts, start.as_deref())?;
    let use_start = match (&start, solution.status) {
        (Some(_), SolveStatus::TimeLimit) => true,
        (Some(s), SolveStatus::FeasibleGapLimited) => {
            let seeded = sm.model.objective_value(s);
            seeded < solution.objective_value - 1e-9 * seeded.abs().max(1.0)
        }
        _ => false,
    };
    let solution = match (use_start, start) {
        (true, Some(values)) => Solution {
            status: SolveStatus::FeasibleGapLimited,
            objective_value: sm.model.objective_value(&values),
            values,
            mip_gap: solution.mip_gap,
            solve_seconds: solution.solve_seconds,
        },
        _ => solution,
    };
    let result = decode(sm, &solution, sc)?;
    Ok((result, solution.values))
}

/// Cheapest feasible start for `sm`: the constructive benchmark plan for
/// MGS; for storage models the previous solution with empty storage or the
/// fixed-binary LP built from it.
fn best_start(
    sm: &SizingModel,
    sc: &Scenario,
    prev: Option<&(SizingModel, SizingResult, Vec<f64>)>,
    solver: &dyn MilpSolver,
    opts: &SolveOptions,
) -> Result<Option<Vec<f64>>> {
    let mut candidates = Vec::new();
    match prev {
        Some((prev_sm, prev_result, x)) => {
            candidates.push(sm.start_from(prev_sm, x));
            if let Some(lp) = storage_start(sm, prev_result, solver, opts)? {
                candidates.push(lp);
            }
        }
        None => candidates.extend(mgs_start(sc, Execution::default()).map(|plan| plan.values(sm))),
    }
    Ok(candidates
        .into_iter()
        .filter(|x| start_is_feasible(sm, x))
        .map(|x| (sm.model.objective_value(&x), x))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, x)| x))
}

/// Solve `models` and, when `ipoc` is given, the correction loop.
///
/// Models are solved MGS, then MGS-NIB, then MGS-IB, each seeded from the
/// previous one, so the objective ordering holds even when a time limit
/// stops the search early.
pub fn solve_models(
    sc: &Scenario,
    models: &[ModelKind],
    solver: &dyn MilpSolver,
    opts: &SolveOptions,
    ipoc: Option<&IpocOptions>,
) -> Result<ComparisonReport> {
    let order = [ModelKind::Mgs, ModelKind::MgsNib, ModelKind::MgsIb];
    let mut solved: Vec<(SizingModel, SizingResult, Vec<f64>)> = Vec::new();
    let mut build_seconds = Vec::new();
    for kind in order.into_iter().filter(|k| models.contains(k)) {
        let began = Instant::now();
        let sm = build(kind, sc)?;
        build_seconds.push((kind, began.elapsed().as_secs_f64()));
        let start = best_start(&sm, sc, solved.last(), solver, opts)?;
        let (result, values) = solve_seeded(&sm, sc, solver, opts, start)?;
        solved.push((sm, result, values));
    }

    let ipoc = match ipoc {
        Some(o) => {
            let (_, nib, x) = solved
                .iter()
                .find(|(sm, _, _)| sm.kind == ModelKind::MgsNib)
                .ok_or_else(|| Error::InvalidParam {
                    field: "ipoc",
                    reason: "the correction loop needs MGS-NIB".into(),
                })?;
            let o = IpocOptions { solve: *opts, ..*o };
            Some(run_ipoc(
                sc,
                solver,
                &o,
                IpocStart::Solved(Box::new(nib.clone()), x.clone()),
            )?)
        }
        None => None,
    };

    solved.sort_by_key(|(sm, _, _)| sm.kind);
    build_seconds.sort_by_key(|b| b.0);
    let lp = solved
        .iter()
        .map(|(sm, _, _)| Ok((sm.kind, write_lp(&sm.model)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport {
        scenario: sc.clone(),
        results: solved.into_iter().map(|(_, r, _)| r).collect(),
        ipoc,
        lp,
        solver: solver.name().into(),
        build_seconds,
    })
}

fn manifest(report: &ComparisonReport) -> Manifest {
    let sc = &report.scenario;
    Manifest {
        resolution: sc.profiles.resolution().label().into(),
        alpha: sc.alpha(),
        days: sc.profiles.days(),
        hours: sc.profiles.hours(),
        big_m: sc.big_m,
        dg_min_mode: files::mode_label(sc.dg_min_mode).into(),
        solver: report.solver.clone(),
        params: sc.params.clone(),
        models: report
            .results
            .iter()
            .map(|r| ManifestModel {
                kind: r.kind.slug().into(),
                status: r.status.label().into(),
                objective: r.objective,
                mip_gap: r.mip_gap,
                deg_factor: r.deg_factor,
                dg_size: r.sizes.dg,
                pv_size: r.sizes.pv,
                bess_size: r.sizes.bess,
                e_init: r.e_init,
            })
            .collect(),
        ipoc: report.ipoc.as_ref().map(|i| ManifestIpoc {
            termination: i.termination.label().into(),
            selected: i.selected + 1,
            iterations: i.iterations.len(),
        }),
    }
}

fn summary_text(report: &ComparisonReport) -> String {
    let sc = &report.scenario;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "resolution {} ({} representative days, alpha {}), solver {}",
        sc.profiles.resolution().label(),
        sc.profiles.days(),
        sc.alpha(),
        report.solver
    );
    for r in &report.results {
        let built = report.build_seconds.iter().find(|b| b.0 == r.kind).map_or(0.0, |b| b.1);
        let _ = writeln!(
            s,
            "{:<8} {:<9} gap {:.2e}  build {:.2} s  solve {:.2} s",
            r.kind.label(),
            r.status.label(),
            r.mip_gap,
            built,
            r.solve_seconds
        );
    }
    s.push('\n');
    s.push_str(&report.cost_table().to_text());
    s.push('\n');
    s.push_str(&report.size_table().to_text());
    s.push('\n');
    s.push_str(&report.energy_table().to_text());
    if let Some(ipoc) = &report.ipoc {
        let _ = writeln!(
            s,
            "\ncorrection loop: {} after {} iteration(s), reporting iteration {}",
            ipoc.termination.label(),
            ipoc.iterations.len(),
            ipoc.selected + 1
        );
        if let crate::ipoc::Termination::SolveFailed(msg) = &ipoc.termination {
            let _ = writeln!(s, "last solve failed: {msg}");
        }
        s.push_str(&ipoc_table(ipoc).to_text());
    }
    s
}

/// Write every report file into `dir`, creating it if needed.
pub fn write_report(report: &ComparisonReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    report.cost_table().write_csv(&dir.join("costs.csv"))?;
    report.size_table().write_csv(&dir.join("sizes.csv"))?;
    report.energy_table().write_csv(&dir.join("energy.csv"))?;
    if let Some(ipoc) = &report.ipoc {
        ipoc_table(ipoc).write_csv(&dir.join("ipoc.csv"))?;
    }
    for r in &report.results {
        let slug = r.kind.slug();
        files::write_dispatch(&dir.join(format!("dispatch_{slug}.csv")), r)?;
        if r.has_storage() {
            files::write_soc(&dir.join(format!("soc_{slug}.csv")), r)?;
        }
    }
    for (kind, text) in &report.lp {
        let path = dir.join(format!("model_{}.lp", kind.slug()));
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    manifest(report).write(&dir.join("manifest.toml"))?;
    let path = dir.join("summary.txt");
    std::fs::write(&path, summary_text(report)).map_err(|e| Error::io(&path, e))
}

/// Load inputs, solve, and write the report.
pub fn run(cfg: &RunConfig, solver: &dyn MilpSolver) -> Result<ComparisonReport> {
    cfg.validate()?;
    let sc = load_scenario(cfg)?;
    let report = solve_models(&sc, &cfg.models, solver, &cfg.solve, cfg.ipoc.as_ref())?;
    write_report(&report, &cfg.out_dir)?;
    Ok(report)
}
