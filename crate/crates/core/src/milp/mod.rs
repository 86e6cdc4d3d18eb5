//! Solver-agnostic MILP representation, LP export and solver adapters.

mod lp;
mod model;
mod solver;

pub use lp::write_lp;
pub use model::{Constraint, ConstraintSense, LinearExpr, MilpModel, VarId, VarKind, Variable};
pub use solver::{
    solve, Backend, HighsSolver, LpFileSolver, MilpSolver, Solution, SolveOptions, SolveStatus, FEASIBILITY_TOL,
    INTEGRALITY_TOL, PRESOLVE_MAX_BINARIES, SOLVER_ENV, SOLVER_LOG_ENV,
};
