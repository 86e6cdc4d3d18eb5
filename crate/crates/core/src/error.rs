use std::path::PathBuf;

use thiserror::Error;

use crate::scenario::ResolutionMode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("{path}: {reason}")]
    ProfileFormat { path: PathBuf, reason: String },

    #[error("{path}: day {day}, hour {hour}: {reason}")]
    ProfileValue {
        path: PathBuf,
        day: usize,
        hour: usize,
        reason: String,
    },

    #[error("invalid profiles: {0}")]
    InvalidProfiles(String),

    #[error("cannot resample from {from:?} to {to:?}")]
    Resample { from: ResolutionMode, to: ResolutionMode },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("constraint `{constraint}` references a variable not registered in the model")]
    UnregisteredVariable { constraint: String },

    #[error("solver configuration: {0}")]
    SolverConfig(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("{0} is infeasible or unbounded")]
    Infeasible(String),

    #[error("{0} hit the time limit without a feasible solution")]
    NoIncumbent(String),

    #[error("solution integrity: {0}")]
    Integrity(String),

    #[error("verification failed: {0}")]
    Verify(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parameter file {path}: {reason}")]
    ParamFile { path: PathBuf, reason: String },
}

/// Coarse grouping of errors, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Infeasible,
    Timeout,
    Io,
    Integrity,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Infeasible(_) => ErrorClass::Infeasible,
            Error::NoIncumbent(_) => ErrorClass::Timeout,
            Error::Io { .. } | Error::Csv(_) => ErrorClass::Io,
            Error::Integrity(_) | Error::Verify(_) | Error::Solver(_) => ErrorClass::Integrity,
            _ => ErrorClass::Input,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
