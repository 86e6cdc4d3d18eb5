//! Sizing of islanded DG/PV/battery microgrids by mixed-integer programming.

pub mod degradation;
pub mod error;
pub mod exec;
pub mod ipoc;
pub mod milp;
pub mod report;
pub mod scenario;
pub mod sizing;
pub mod synthetic;

pub use error::{Error, ErrorClass, Result};
