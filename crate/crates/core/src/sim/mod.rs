//! Event-driven mission simulator.

mod engine;
mod event;
mod noise;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::segment_cost;

pub use engine::{placement, simulate, AgentStart, DecisionRecord, Form, SimulationResult, Visit};
pub use event::{EventKind, EventRecord};
pub use noise::{NoiseConfig, NoiseError, NoiseModel};

/// Default cap on processed events.
pub const MAX_EVENTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Mission length.
    pub t_end: f64,
    /// Planning horizon bound.
    pub horizon: f64,
    pub noise: NoiseConfig,
    pub seed: u64,
    pub max_events: usize,
}

impl SimConfig {
    pub fn new(t_end: f64, horizon: f64) -> Self {
        Self { t_end, horizon, noise: NoiseConfig::default(), seed: 0, max_events: MAX_EVENTS }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(SimError::Duration(self.t_end));
        }
        if !(self.horizon > 0.0) {
            return Err(SimError::Horizon(self.horizon));
        }
        self.noise.validate()?;
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("mission time must be finite and positive, got {0}")]
    Duration(f64),
    #[error("planning horizon must be positive, got {0}")]
    Horizon(f64),
    #[error("{agents} agents but {controllers} controllers")]
    Controllers { agents: usize, controllers: usize },
    #[error("agent {agent} starts at unknown target index {target}")]
    Start { agent: u32, target: usize },
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("more than {limit} events by time {time}; aborting (event storm)")]
    Zeno { limit: usize, time: f64 },
    #[error("uncertainty trajectory of target {0} does not cover the mission")]
    Gap(u32),
}

/// Mean uncertainty `(1/T) Σ_i ∫ R_i` of piecewise-linear trajectories. Each list must run from
/// time 0 to `t_end` with nondecreasing times; on failure returns the offending list index.
pub fn accumulate_objective(breakpoints: &[Vec<(f64, f64)>], t_end: f64) -> Result<f64, usize> {
    let mut total = 0.0;
    for (i, points) in breakpoints.iter().enumerate() {
        let (Some(first), Some(last)) = (points.first(), points.last()) else {
            return Err(i);
        };
        if first.0 != 0.0 || last.0 != t_end {
            return Err(i);
        }
        for w in points.windows(2) {
            let ((t0, r0), (t1, r1)) = (w[0], w[1]);
            let dt = t1 - t0;
            if dt < 0.0 {
                return Err(i);
            }
            if dt > 0.0 {
                total += segment_cost(r0, (r1 - r0) / dt, dt);
            }
        }
    }
    Ok(total / t_end)
}

/// Writes the event log as CSV: `time,kind,agent,target,R_<id>...`.
pub fn write_trace<W: Write>(result: &SimulationResult, mut out: W) -> io::Result<()> {
    write!(out, "time,kind,agent,target")?;
    for id in &result.target_ids {
        write!(out, ",R_{id}")?;
    }
    writeln!(out)?;
    for e in &result.events {
        write!(out, "{},{},", e.time, e.kind)?;
        if let Some(a) = e.agent {
            write!(out, "{a}")?;
        }
        write!(out, ",{}", e.target)?;
        for r in &e.r {
            write!(out, ",{r}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
