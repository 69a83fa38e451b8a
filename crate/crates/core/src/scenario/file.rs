use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{Controller, ControllerError, ControllerParams, ControllerRegistry, Weight};
use crate::model::{Edge, GraphError, Target, TargetGraph};
use crate::sim::{
    placement, simulate, AgentStart, NoiseConfig, NoiseError, SimConfig, SimError, SimulationResult, MAX_EVENTS,
};

pub const DEFAULT_A: f64 = 1.0;
pub const DEFAULT_B: f64 = 10.0;
pub const DEFAULT_R0: f64 = 0.5;
pub const DEFAULT_T: f64 = 500.0;
pub const DEFAULT_V: f64 = 50.0;

fn default_a() -> f64 {
    DEFAULT_A
}

fn default_b() -> f64 {
    DEFAULT_B
}

fn default_r0() -> f64 {
    DEFAULT_R0
}

fn default_t() -> f64 {
    DEFAULT_T
}

fn default_v() -> f64 {
    DEFAULT_V
}

fn default_controller() -> String {
    "rhc".to_string()
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub id: u32,
    pub position: [f64; 2],
    #[serde(rename = "A", default = "default_a")]
    pub a: f64,
    #[serde(rename = "B", default = "default_b")]
    pub b: f64,
    #[serde(rename = "R0", default = "default_r0")]
    pub r0: f64,
}

/// A travel edge between target ids. Transit time is `rho` if given, else `length / V`, where the
/// length defaults to the distance between the two targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub i: u32,
    pub j: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(rename = "V", default = "default_v")]
    pub v: f64,
    /// Also adds the edge `(j, i)`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub bidirectional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Start {
    Target(u32),
    #[default]
    #[serde(with = "auto_tag")]
    Auto,
}

mod auto_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "auto" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected a target id or \"auto\", got {s:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: u32,
    #[serde(default)]
    pub start: Start,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    #[serde(rename = "type", default = "default_controller")]
    pub kind: String,
    /// Planning horizon bound; half the mission time when absent.
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default)]
    pub alpha: Weight,
    #[serde(default)]
    pub beta: Weight,
}

impl Default for ControllerSpec {
    fn default() -> Self {
        Self { kind: default_controller(), h: None, alpha: Weight::Nominal, beta: Weight::Nominal }
    }
}

/// A mission: targets, edges, agents, controller and noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub agents: Vec<AgentSpec>,
    #[serde(rename = "T", default = "default_t")]
    pub t_end: f64,
    #[serde(default)]
    pub controller: ControllerSpec,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid scenario: {0}")]
    Schema(String),
    #[error("invalid scenario: {0} (every target needs a removal rate B above its growth rate A)")]
    Graph(#[from] GraphError),
    #[error("edge ({i}, {j}) references an unknown target")]
    EdgeTarget { i: u32, j: u32 },
    #[error("edge ({i}, {j}) needs a finite positive {what}")]
    EdgeValue { i: u32, j: u32, what: &'static str },
    #[error("agent {agent} starts at unknown target {target}")]
    AgentTarget { agent: u32, target: u32 },
    #[error("duplicate agent id {0}")]
    DuplicateAgent(u32),
    #[error("{agents} agents with automatic placement need at least as many targets, got {targets}")]
    Crowded { agents: usize, targets: usize },
    #[error("mission time T must be finite and positive, got {0}")]
    Duration(f64),
    #[error("planning horizon H must be finite and positive, got {0}")]
    Horizon(f64),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error("{0}")]
    Generate(String),
}

/// Failure of a scenario run: either the input is invalid or the simulation aborted.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("simulation aborted: {0}")]
    Sim(#[from] SimError),
}

/// Parses and validates a scenario, filling in the planning horizon when absent.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let mut file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Schema(e.to_string()))?;
    if file.controller.h.is_none() {
        file.controller.h = Some(file.t_end / 2.0);
    }
    file.validate()?;
    Ok(file)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    parse_scenario(&text)
}

impl ScenarioFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn horizon(&self) -> f64 {
        self.controller.h.unwrap_or(self.t_end / 2.0)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(ScenarioError::Duration(self.t_end));
        }
        let h = self.horizon();
        if !(h.is_finite() && h > 0.0) {
            return Err(ScenarioError::Horizon(h));
        }
        self.noise.validate()?;
        self.graph()?;
        self.starts()?;
        Ok(())
    }

    pub fn graph(&self) -> Result<TargetGraph, ScenarioError> {
        let targets: Vec<Target> =
            self.targets.iter().map(|t| Target { id: t.id, position: t.position, a: t.a, b: t.b, r0: t.r0 }).collect();
        let index = |id: u32| targets.iter().position(|t| t.id == id);
        let mut edges = Vec::new();
        for e in &self.edges {
            let (Some(i), Some(j)) = (index(e.i), index(e.j)) else {
                return Err(ScenarioError::EdgeTarget { i: e.i, j: e.j });
            };
            let bad = |what| ScenarioError::EdgeValue { i: e.i, j: e.j, what };
            if !(e.v.is_finite() && e.v > 0.0) {
                return Err(bad("V"));
            }
            let (pi, pj) = (targets[i].position, targets[j].position);
            let length = e.length.unwrap_or_else(|| (pi[0] - pj[0]).hypot(pi[1] - pj[1]));
            if !(length.is_finite() && length > 0.0) {
                return Err(bad("length"));
            }
            let rho = e.rho.unwrap_or(length / e.v);
            if !(rho.is_finite() && rho > 0.0) {
                return Err(bad("rho"));
            }
            edges.push(Edge { from: i, to: j, rho, length, speed: e.v });
            if e.bidirectional {
                edges.push(Edge { from: j, to: i, rho, length, speed: e.v });
            }
        }
        Ok(TargetGraph::new(targets, edges)?)
    }

    pub fn starts(&self) -> Result<Vec<AgentStart>, ScenarioError> {
        let mut seen = BTreeSet::new();
        let mut fixed = Vec::with_capacity(self.agents.len());
        for a in &self.agents {
            if !seen.insert(a.id) {
                return Err(ScenarioError::DuplicateAgent(a.id));
            }
            fixed.push(match a.start {
                Start::Auto => None,
                Start::Target(id) => Some(
                    self.targets
                        .iter()
                        .position(|t| t.id == id)
                        .ok_or(ScenarioError::AgentTarget { agent: a.id, target: id })?,
                ),
            });
        }
        let auto = fixed.iter().filter(|f| f.is_none()).count();
        if auto > 0 && self.agents.len() > self.targets.len() {
            return Err(ScenarioError::Crowded { agents: self.agents.len(), targets: self.targets.len() });
        }
        let at = placement(self.targets.len(), &fixed);
        Ok(self.agents.iter().zip(at).map(|(a, target)| AgentStart { id: a.id, target }).collect())
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            t_end: self.t_end,
            horizon: self.horizon(),
            noise: self.noise,
            seed: self.seed,
            max_events: MAX_EVENTS,
        }
    }

    /// One controller per agent, built from the registry by name.
    pub fn controllers(&self, registry: &ControllerRegistry) -> Result<Vec<Box<dyn Controller>>, ScenarioError> {
        let params = ControllerParams { alpha: self.controller.alpha, beta: self.controller.beta };
        self.agents
            .iter()
            .map(|_| registry.build(&self.controller.kind, &params).map_err(ScenarioError::from))
            .collect()
    }

    pub fn run(&self, registry: &ControllerRegistry) -> Result<SimulationResult, RunError> {
        self.validate()?;
        let graph = self.graph()?;
        let starts = self.starts()?;
        let controllers = self.controllers(registry)?;
        Ok(simulate(&graph, &starts, controllers, &self.sim_config())?)
    }
}
