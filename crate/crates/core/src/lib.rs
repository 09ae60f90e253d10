//! Agent-directed test generation for a simulated autonomous vehicle.
//!
//! Pedestrian agents on a 12x66 road grid try to step into the precondition
//! zone of a collision-avoidance assertion ahead of a constant-speed AV. The
//! crate provides the grid world ([`gridworld`]), the four pedestrian policies
//! ([`behaviours`]), the assertion monitor and scoring ([`verdict`]), the
//! seeded batch harness ([`harness`]) and file outputs plus the `avtest`
//! command line ([`reporting`]).

pub mod behaviours;
pub mod error;
pub mod gridworld;
pub mod harness;
pub mod reporting;
pub mod rng;
pub mod stats;
pub mod verdict;

pub use behaviours::{Action, BehaviourKind, BehaviourParams, TriggerMode};
pub use error::{ConfigError, GridError, ReportError};
pub use gridworld::{GridConfig, Position};
pub use harness::{BatchSummary, Experiment, ExperimentConfig, IntrusionPolicy, ScoreMeanMode, Spawn, TestResult};
pub use verdict::Outcome;

/// Version string written into output metadata.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
