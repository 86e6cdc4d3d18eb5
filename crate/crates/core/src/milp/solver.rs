//! Solver adapter boundary and the HiGHS-backed implementations.

use std::ffi::{CStr, CString};
use std::os::raw::{c_char, c_void};
use std::time::Instant;

use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem, Sense};

use super::lp::write_lp;
use super::model::{ConstraintSense, MilpModel, VarKind};
use crate::error::{Error, Result};

/// Environment variable selecting the solver backend.
pub const SOLVER_ENV: &str = "GRIDSIZER_SOLVER";
/// When set (to anything), HiGHS prints its log to stdout.
pub const SOLVER_LOG_ENV: &str = "GRIDSIZER_SOLVER_LOG";

fn solver_log() -> bool {
    std::env::var_os(SOLVER_LOG_ENV).is_some()
}

/// Absolute feasibility tolerance applied to returned solutions.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Integrality tolerance for binary variables.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative MIP gap at which the search stops.
    pub mip_gap: f64,
    /// Wall-clock limit, seconds.
    pub time_limit: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mip_gap: 0.0,
            time_limit: 43_200.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Stopped on the time limit holding a feasible incumbent.
    FeasibleGapLimited,
    Infeasible,
    Unbounded,
    /// Stopped on the time limit without any incumbent.
    TimeLimit,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleGapLimited)
    }

    pub fn label(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::FeasibleGapLimited => "Feasible",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::Unbounded => "Unbounded",
            SolveStatus::TimeLimit => "TimeLimit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective_value: f64,
    /// One value per registered variable; empty without an incumbent.
    pub values: Vec<f64>,
    pub mip_gap: f64,
    pub solve_seconds: f64,
}

impl Solution {
    pub fn value(&self, var: super::VarId) -> f64 {
        self.values[var.index()]
    }

    fn without_values(status: SolveStatus, solve_seconds: f64) -> Self {
        Self {
            status,
            objective_value: f64::NAN,
            values: Vec::new(),
            mip_gap: f64::INFINITY,
            solve_seconds,
        }
    }
}

/// A MILP backend. Implementations hold no mutable state shared between
/// calls, so one instance may serve concurrent solves.
pub trait MilpSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Solve `model`, optionally seeded with a full primal assignment that
    /// the backend may use as its first incumbent.
    fn solve(&self, model: &MilpModel, opts: &SolveOptions, start: Option<&[f64]>) -> Result<Solution>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Model passed to HiGHS in memory.
    #[default]
    Highs,
    /// Model serialized to an LP file, which HiGHS parses back.
    HighsLpFile,
}

impl Backend {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "" | "highs" => Ok(Backend::Highs),
            "highs-lp" | "lp" | "lpfile" => Ok(Backend::HighsLpFile),
            other => Err(Error::SolverConfig(format!(
                "unknown solver backend `{other}` in {SOLVER_ENV}; expected `highs` or `highs-lp`"
            ))),
        }
    }

    pub fn from_env() -> Result<Self> {
        match std::env::var(SOLVER_ENV) {
            Ok(v) => Self::parse(&v),
            Err(std::env::VarError::NotPresent) => Ok(Backend::Highs),
            Err(e) => Err(Error::SolverConfig(format!("{SOLVER_ENV}: {e}"))),
        }
    }

    pub fn solver(self) -> Box<dyn MilpSolver> {
        match self {
            Backend::Highs => Box::new(HighsSolver),
            Backend::HighsLpFile => Box::new(LpFileSolver),
        }
    }
}

/// Solve with the backend named by [`SOLVER_ENV`].
pub fn solve(model: &MilpModel, opts: &SolveOptions) -> Result<Solution> {
    Backend::from_env()?.solver().solve(model, opts, None)
}

fn check_options(opts: &SolveOptions) -> Result<()> {
    if !(opts.mip_gap >= 0.0 && opts.mip_gap.is_finite()) {
        return Err(Error::SolverConfig(format!("mip_gap {} must be >= 0", opts.mip_gap)));
    }
    if opts.time_limit.is_nan() || opts.time_limit <= 0.0 {
        return Err(Error::SolverConfig(format!(
            "time_limit {} must be > 0",
            opts.time_limit
        )));
    }
    Ok(())
}

fn map_status(status: HighsModelStatus, has_incumbent: bool) -> Result<SolveStatus> {
    Ok(match status {
        HighsModelStatus::Optimal => SolveStatus::Optimal,
        HighsModelStatus::Infeasible => SolveStatus::Infeasible,
        HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => SolveStatus::Unbounded,
        HighsModelStatus::ReachedTimeLimit
        | HighsModelStatus::ReachedIterationLimit
        | HighsModelStatus::ReachedSolutionLimit
        | HighsModelStatus::ReachedInterrupt
        | HighsModelStatus::ReachedMemoryLimit => {
            if has_incumbent {
                SolveStatus::FeasibleGapLimited
            } else {
                SolveStatus::TimeLimit
            }
        }
        other => return Err(Error::Solver(format!("HiGHS returned model status {other:?}"))),
    })
}

fn has_binaries(model: &MilpModel) -> bool {
    model.vars().iter().any(|v| v.kind == VarKind::Binary)
}

/// Above this many free binaries presolve is switched off. On year-long
/// sizing models, root cut separation on the presolved problem exhausts
/// memory; the unreduced problem stays within a few hundred MB.
pub const PRESOLVE_MAX_BINARIES: usize = 5000;

fn presolve_enabled(model: &MilpModel) -> bool {
    let free = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary && v.lower < v.upper)
        .count();
    free <= PRESOLVE_MAX_BINARIES
}

/// In-memory HiGHS backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct HighsSolver;

impl MilpSolver for HighsSolver {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions, start: Option<&[f64]>) -> Result<Solution> {
        model.validate()?;
        check_options(opts)?;
        let began = Instant::now();
        if model.num_vars() == 0 {
            return Ok(Solution {
                status: SolveStatus::Optimal,
                objective_value: model.objective().constant_part(),
                values: Vec::new(),
                mip_gap: 0.0,
                solve_seconds: 0.0,
            });
        }

        let cost = model.objective_coefficients();
        let mut problem = RowProblem::default();
        let cols: Vec<highs::Col> = model
            .vars()
            .iter()
            .zip(&cost)
            .map(|(v, &c)| match v.kind {
                VarKind::Continuous => problem.add_column(c, v.lower..=v.upper),
                VarKind::Binary => problem.add_integer_column(c, v.lower..=v.upper),
            })
            .collect();
        for c in model.constraints() {
            let row = c.expr.terms().iter().map(|&(v, coef)| (cols[v.index()], coef));
            match c.sense {
                ConstraintSense::Le => problem.add_row(..=c.rhs, row),
                ConstraintSense::Ge => problem.add_row(c.rhs.., row),
                ConstraintSense::Eq => problem.add_row(c.rhs..=c.rhs, row),
            }
        }

        let mut highs = problem.optimise(Sense::Minimise);
        if solver_log() {
            highs.set_option("output_flag", true);
            highs.set_option("log_to_console", true);
        } else {
            highs.make_quiet();
        }
        highs.set_option("mip_rel_gap", opts.mip_gap);
        highs.set_option("time_limit", opts.time_limit);
        highs.set_option("mip_feasibility_tolerance", 1e-7);
        highs.set_option("primal_feasibility_tolerance", 1e-8);
        if !presolve_enabled(model) {
            highs.set_option("presolve", "off");
        }
        if let Some(start) = start {
            if start.len() != model.num_vars() {
                return Err(Error::SolverConfig(
                    "start vector length differs from the variable count".into(),
                ));
            }
            highs
                .try_set_solution(Some(start), None, None, None)
                .map_err(|e| Error::Solver(format!("rejected start solution: {e:?}")))?;
        }
        let solved = highs
            .try_solve()
            .map_err(|e| Error::Solver(format!("HiGHS run failed: {e:?}")))?;
        let seconds = began.elapsed().as_secs_f64();
        let incumbent = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let status = map_status(solved.status(), incumbent)?;
        if !status.has_solution() {
            return Ok(Solution::without_values(status, seconds));
        }
        let values = solved.get_solution().columns().to_vec();
        let gap = if has_binaries(model) { solved.mip_gap() } else { 0.0 };
        Ok(Solution {
            status,
            objective_value: solved.objective_value() + model.objective().constant_part(),
            values,
            mip_gap: gap,
            solve_seconds: seconds,
        })
    }
}

/// Owned raw HiGHS instance for the LP-file route.
struct RawHighs(*mut c_void);

impl RawHighs {
    fn new() -> Self {
        Self(unsafe { highs_sys::Highs_create() })
    }

    fn call(&self, what: &str, status: highs_sys::HighsInt) -> Result<()> {
        if status == highs_sys::STATUS_ERROR {
            Err(Error::Solver(format!("HiGHS {what} failed")))
        } else {
            Ok(())
        }
    }

    fn set_double(&mut self, option: &str, value: f64) -> Result<()> {
        let key = CString::new(option).expect("option names have no NUL");
        let status = unsafe { highs_sys::Highs_setDoubleOptionValue(self.0, key.as_ptr(), value) };
        self.call(option, status)
    }

    fn set_string(&mut self, option: &str, value: &str) -> Result<()> {
        let key = CString::new(option).expect("option names have no NUL");
        let value = CString::new(value).expect("option values have no NUL");
        let status = unsafe { highs_sys::Highs_setStringOptionValue(self.0, key.as_ptr(), value.as_ptr()) };
        self.call(option, status)
    }

    fn double_info(&self, info: &CStr) -> f64 {
        let mut value = 0.0;
        unsafe { highs_sys::Highs_getDoubleInfoValue(self.0, info.as_ptr(), &mut value) };
        value
    }

    fn int_info(&self, info: &CStr) -> highs_sys::HighsInt {
        let mut value = 0;
        unsafe { highs_sys::Highs_getIntInfoValue(self.0, info.as_ptr(), &mut value) };
        value
    }

    fn col_name(&self, col: highs_sys::HighsInt) -> Result<String> {
        // kHighsMaximumStringLength
        let mut buf = vec![0 as c_char; 512];
        let status = unsafe { highs_sys::Highs_getColName(self.0, col, buf.as_mut_ptr()) };
        self.call("getColName", status)?;
        let name = unsafe { CStr::from_ptr(buf.as_ptr()) };
        Ok(name.to_string_lossy().into_owned())
    }
}

impl Drop for RawHighs {
    fn drop(&mut self) {
        unsafe { highs_sys::Highs_destroy(self.0) }
    }
}

/// Backend that round-trips the model through its LP text form.
#[derive(Debug, Clone, Copy, Default)]
pub struct LpFileSolver;

impl MilpSolver for LpFileSolver {
    fn name(&self) -> &'static str {
        "highs-lp"
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions, start: Option<&[f64]>) -> Result<Solution> {
        check_options(opts)?;
        let text = write_lp(model)?;
        let began = Instant::now();
        let file = tempfile::Builder::new()
            .suffix(".lp")
            .tempfile()
            .map_err(|e| Error::io(std::env::temp_dir(), e))?;
        std::fs::write(file.path(), text).map_err(|e| Error::io(file.path(), e))?;
        let path = CString::new(file.path().to_string_lossy().as_bytes())
            .map_err(|_| Error::SolverConfig("temp path contains NUL".into()))?;

        let mut h = RawHighs::new();
        let quiet = CString::new("output_flag").expect("static");
        let flag = highs_sys::HighsInt::from(solver_log());
        unsafe { highs_sys::Highs_setBoolOptionValue(h.0, quiet.as_ptr(), flag) };
        let status = unsafe { highs_sys::Highs_readModel(h.0, path.as_ptr()) };
        h.call("readModel", status)?;
        h.set_double("mip_rel_gap", opts.mip_gap)?;
        h.set_double("time_limit", opts.time_limit)?;
        h.set_double("mip_feasibility_tolerance", 1e-7)?;
        h.set_double("primal_feasibility_tolerance", 1e-8)?;
        if !presolve_enabled(model) {
            h.set_string("presolve", "off")?;
        }

        // the parser numbers columns by first appearance; map them back by name
        let n = unsafe { highs_sys::Highs_getNumCol(h.0) } as usize;
        let mut to_model = Vec::with_capacity(n);
        for col in 0..n {
            let name = h.col_name(col as highs_sys::HighsInt)?;
            let id = model
                .var_by_name(&name)
                .ok_or_else(|| Error::Solver(format!("LP reader produced unknown column `{name}`")))?;
            to_model.push(id);
        }
        if to_model.len() != model.num_vars() {
            return Err(Error::Solver(format!(
                "LP reader saw {} columns, model has {}",
                to_model.len(),
                model.num_vars()
            )));
        }
        if let Some(start) = start {
            let cols: Vec<f64> = to_model.iter().map(|id| start[id.index()]).collect();
            let status = unsafe {
                highs_sys::Highs_setSolution(h.0, cols.as_ptr(), std::ptr::null(), std::ptr::null(), std::ptr::null())
            };
            h.call("setSolution", status)?;
        }

        let status = unsafe { highs_sys::Highs_run(h.0) };
        h.call("run", status)?;
        let seconds = began.elapsed().as_secs_f64();
        let raw_status = unsafe { highs_sys::Highs_getModelStatus(h.0) };
        let model_status = HighsModelStatus::try_from(raw_status).map_err(|e| Error::Solver(format!("{e:?}")))?;
        let incumbent = h.int_info(c"primal_solution_status") == highs_sys::SOLUTION_STATUS_FEASIBLE;
        let status = map_status(model_status, incumbent)?;
        if !status.has_solution() {
            return Ok(Solution::without_values(status, seconds));
        }
        let rows = unsafe { highs_sys::Highs_getNumRow(h.0) } as usize;
        let mut col_value = vec![0.0; n];
        let mut col_dual = vec![0.0; n];
        let mut row_value = vec![0.0; rows];
        let mut row_dual = vec![0.0; rows];
        let rc = unsafe {
            highs_sys::Highs_getSolution(
                h.0,
                col_value.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row_value.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            )
        };
        h.call("getSolution", rc)?;
        let mut values = vec![0.0; n];
        for (col, id) in to_model.iter().enumerate() {
            values[id.index()] = col_value[col];
        }
        let gap = if has_binaries(model) {
            h.double_info(c"mip_gap")
        } else {
            0.0
        };
        let objective = unsafe { highs_sys::Highs_getObjectiveValue(h.0) };
        Ok(Solution {
            status,
            objective_value: objective,
            values,
            mip_gap: gap,
            solve_seconds: seconds,
        })
    }
}
