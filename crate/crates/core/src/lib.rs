//! Approximation algorithms for single-machine scheduling with release times
//! and precedence constraints, minimizing total weighted completion time.
//!
//! The pipeline solves a completion-time LP, splits jobs into geometrically
//! growing intervals by their LP values, and solves every interval by guessing
//! the early jobs of a near-optimal schedule and list scheduling in LP order.
//! An exact subset dynamic program serves as ground truth at small sizes.

#![allow(clippy::needless_range_loop)]

pub mod bounded;
pub mod decompose;
pub mod error;
pub mod exact;
pub mod harness;
pub mod instance;
pub mod list_sched;
pub mod lp;
pub mod rational;
pub mod schedule;
pub mod simplex;

pub use error::{Error, Result};
pub use instance::{normalize_release_times, transitive_closure, validate, Instance, InstanceFile, Job};
pub use lp::{solve_lp, Cut, LpConfig, LpSolution};
pub use schedule::{schedule_cost, tighten, Schedule};
pub use list_sched::{list_schedule, lp_ls, JobOrder, LsVariant};
pub use rational::Epsilon;
pub use exact::{exact_opt, ExactSolution};
pub use bounded::{solve_bounded, BoundedConfig, BoundedMode, BoundedResult};
pub use decompose::{decompose_and_solve, DecomposeResult, OffsetMode, SubInstance};
