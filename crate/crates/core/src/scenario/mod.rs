//! Scenario files, generated layouts and parameter sweeps.

mod file;
mod generate;
mod sweep;

pub use file::{
    load_scenario, parse_scenario, AgentSpec, ControllerSpec, EdgeSpec, RunError, ScenarioError, ScenarioFile, Start,
    TargetSpec, DEFAULT_A, DEFAULT_B, DEFAULT_R0, DEFAULT_T, DEFAULT_V,
};
pub use generate::{generate, Topology, REGION};
pub use sweep::{mean_variance, parse_grid, summarize, sweep, Axis, RunRecord, SweepReport, SweepRow};
