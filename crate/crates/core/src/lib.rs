//! Solvers and simulators for the discrete data-center right-sizing problem.
//!
//! A data center has `m` homogeneous servers. In every time slot a convex
//! operating-cost function arrives and the operator picks how many servers are
//! active; powering servers up costs `beta` per server. This crate provides
//!
//! * [`model`]: instances, schedules and cost evaluation under both switching
//!   conventions, plus the linearly interpolated continuous extension;
//! * [`offline`]: the layered-graph dynamic program and the `O(T log m)`
//!   binary-search solver;
//! * [`lcp`]: Lazy Capacity Provisioning, the 3-competitive online algorithm;
//! * [`randomized`]: randomized rounding of fractional online schedules;
//! * [`adversary`]: lower-bound workload generators and duel orchestration;
//! * [`policy`]: the online-policy contract shared by the duel harness.

pub mod adversary;
pub mod error;
pub mod generate;
pub mod json;
pub mod lcp;
pub mod model;
pub mod offline;
pub mod policy;
pub mod randomized;

pub use error::{Error, Result};
pub use model::{
    AllowedStates, ContinuousExtension, Convention, CostBreakdown, CostFunction,
    FractionalSchedule, Horizon, ProblemInstance, RestrictedInstance, Schedule, UnitLoad,
    Violation,
};
