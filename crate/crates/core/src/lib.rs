//! Multi-installment scheduling of divisible loads on linear processor chains.
//!
//! * [`model`], [`timing`], [`validate`], [`io`]: platform/workload/schedule
//!   types, as-early-as-possible timing, the constraint checker and JSON files.
//! * [`lp`]: the exact linear program for prescribed installment counts.
//! * [`solver`]: two-phase simplex and a vertex-enumeration oracle.
//! * [`heuristics`]: load-by-load strategies used for comparison.
//! * [`sim`]: event-driven replay with per-message latency and startup cost.

// Index loops mirror the subscripted formulas; `!(a <= b)` is how NaN counts
// as a violation.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod heuristics;
pub mod io;
pub mod lp;
pub mod model;
pub mod sim;
pub mod solver;
pub mod timing;
pub mod validate;

pub use model::{
    makespan_of, validate_platform, Grid, InstallmentCounts, Load, ModelError, Platform,
    PlatformDesc, Schedule, Workload,
};
pub use validate::{validate_schedule, ValidationOptions, ValidationReport, Violation};
