//! The three sizing MILPs and decoding of their solutions.
//!
//! | model   | storage | degradation penalty |
//! |---------|---------|---------------------|
//! | MGS     | no      | -                   |
//! | MGS-IB  | yes     | no                  |
//! | MGS-NIB | yes     | per discharged MWh  |
//!
//! All three carry DG capital/operating/no-load costs, PV capital and PV
//! degradation, PV curtailment and big-M DG commitment.

mod build;
mod decode;
mod heuristic;
mod replay;

pub use build::{build, build_mgs, build_mgs_ib, build_mgs_nib, SizingModel, SizingVars, StorageVars};
pub use decode::{decode, CostBreakdown, DispatchRow, EnergySummary, Sizes, SizingResult};
pub use heuristic::{mgs_plan, mgs_start, storage_start, MgsPlan};
pub use replay::{replay, Residuals};

use crate::error::Result;
use crate::milp::{MilpSolver, SolveOptions};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Mgs,
    MgsIb,
    MgsNib,
}

impl ModelKind {
    /// All models in reporting order.
    pub const ALL: [ModelKind; 3] = [ModelKind::Mgs, ModelKind::MgsIb, ModelKind::MgsNib];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Mgs => "MGS",
            ModelKind::MgsIb => "MGS-IB",
            ModelKind::MgsNib => "MGS-NIB",
        }
    }

    /// Lower-case identifier used on the command line and in file names.
    pub fn slug(self) -> &'static str {
        match self {
            ModelKind::Mgs => "mgs",
            ModelKind::MgsIb => "mgs-ib",
            ModelKind::MgsNib => "mgs-nib",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.slug().eq_ignore_ascii_case(s) || k.label().eq_ignore_ascii_case(s))
    }

    pub fn has_storage(self) -> bool {
        self != ModelKind::Mgs
    }
}

/// Solve a built model and decode it.
pub fn solve_sizing(
    sm: &SizingModel,
    sc: &Scenario,
    solver: &dyn MilpSolver,
    opts: &SolveOptions,
    start: Option<&[f64]>,
) -> Result<(SizingResult, Vec<f64>)> {
    let solution = solver.solve(&sm.model, opts, start)?;
    let result = decode(sm, &solution, sc)?;
    Ok((result, solution.values))
}
