//! Online convex function chasing with a long-term demand constraint: competitive
//! and learning-augmented players, exact offline oracles, instance generators and
//! an experiment harness.

pub mod algorithms;
pub mod error;
pub mod harness;
pub mod instances;
pub mod model;
pub mod offline;
pub mod subproblem;
pub mod thresholds;

pub use error::{CflError, Result};
pub use model::{
    compulsory_start, constraint_value, evaluate_cost, trajectory_cost, validate_instance,
    weighted_l1, CostBreakdown, Decision, Instance, Setting, Trajectory, Validation, Violation,
};
pub use thresholds::{ThresholdFn, ThresholdParams};
