use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::controller::Controller;
use crate::model::{TargetGraph, TargetState, TransitTable};
use crate::rhcp::{ControlDecision, RhcpContext};

use super::event::{EventKind, EventQueue, EventRecord, Pending};
use super::noise::{distance, exponential, pursue, stream, uniform, Channel, Drift, NoiseModel, MIN_SPEED_FACTOR};
use super::{accumulate_objective, SimConfig, SimError};

/// Where an agent sits at time zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentStart {
    pub id: u32,
    pub target: usize,
}

/// One stay of an agent at a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub agent: u32,
    pub target: u32,
    pub arrive: f64,
    /// `None` if the agent was still there at the end of the mission.
    pub depart: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Active,
    Idle,
    Departure,
}

/// One solved receding-horizon problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub time: f64,
    pub agent: u32,
    pub target: u32,
    pub form: Form,
    pub horizon: f64,
    pub candidates: Vec<u32>,
    /// Chosen next target, if any candidate was feasible.
    pub next: Option<u32>,
    pub u_i: f64,
    pub v_i: f64,
    pub w: f64,
    /// Transit time committed when the decision made the agent leave.
    pub transit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Mean system uncertainty over the mission.
    pub j_t: f64,
    pub t_end: f64,
    pub target_ids: Vec<u32>,
    pub agent_ids: Vec<u32>,
    pub events: Vec<EventRecord>,
    /// Per target, `(time, R)` points of the piecewise-linear uncertainty trajectory.
    pub breakpoints: Vec<Vec<(f64, f64)>>,
    pub visits: Vec<Visit>,
    pub decisions: Vec<DecisionRecord>,
    /// Largest number of agents dwelling at one target at any time.
    pub max_dwelling: u32,
    /// Largest number of agents dwelling at or heading to one target at any time.
    pub max_committed: u32,
    #[serde(skip)]
    pub wall_seconds: f64,
}

impl SimulationResult {
    /// Target ids visited by one agent, in order.
    pub fn visit_sequence(&self, agent: u32) -> Vec<u32> {
        self.visits.iter().filter(|v| v.agent == agent).map(|v| v.target).collect()
    }
}

/// Start target of each agent. Agents with a fixed start keep it; agent `a` without one goes to
/// `a · round(M/N) mod M`, moving forward past targets already taken while free ones remain.
pub fn placement(m: usize, fixed: &[Option<usize>]) -> Vec<usize> {
    let n = fixed.len();
    if m == 0 {
        return Vec::new();
    }
    let stride = (m as f64 / n.max(1) as f64).round() as usize;
    let mut taken = vec![0usize; m];
    for &k in fixed.iter().flatten() {
        taken[k] += 1;
    }
    let mut free = taken.iter().filter(|&&c| c == 0).count();
    let mut out = Vec::with_capacity(n);
    for (a, f) in fixed.iter().enumerate() {
        let k = match *f {
            Some(k) => k,
            None => {
                let mut k = (a * stride) % m;
                if free > 0 {
                    while taken[k] > 0 {
                        k = (k + 1) % m;
                    }
                }
                if taken[k] == 0 {
                    free -= 1;
                }
                taken[k] += 1;
                k
            }
        };
        out.push(k);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Active,
    Idle,
    Transit,
}

struct TargetRt {
    state: TargetState,
    a: f64,
    n: u32,
    committed: u32,
    crossing_gen: u64,
    growth: Option<ChaCha8Rng>,
    shock: Option<ChaCha8Rng>,
    drift: Option<Drift>,
}

struct AgentRt {
    id: u32,
    at: usize,
    mode: Mode,
    generation: u64,
    partition: Option<Vec<usize>>,
    visit: usize,
    speed: Option<ChaCha8Rng>,
    channel: Option<ChaCha8Rng>,
}

struct Engine<'g> {
    graph: &'g TargetGraph,
    cfg: SimConfig,
    model: NoiseModel,
    transit: TransitTable,
    targets: Vec<TargetRt>,
    agents: Vec<AgentRt>,
    controllers: Vec<Box<dyn Controller>>,
    queue: EventQueue,
    now: f64,
    events: Vec<EventRecord>,
    breakpoints: Vec<Vec<(f64, f64)>>,
    visits: Vec<Visit>,
    decisions: Vec<DecisionRecord>,
    max_dwelling: u32,
    max_committed: u32,
}

/// Runs one mission. Each agent owns one controller, in the order of `agents`.
pub fn simulate(
    graph: &TargetGraph,
    agents: &[AgentStart],
    controllers: Vec<Box<dyn Controller>>,
    cfg: &SimConfig,
) -> Result<SimulationResult, SimError> {
    cfg.validate()?;
    if agents.len() != controllers.len() {
        return Err(SimError::Controllers { agents: agents.len(), controllers: controllers.len() });
    }
    if let Some(a) = agents.iter().find(|a| a.target >= graph.len()) {
        return Err(SimError::Start { agent: a.id, target: a.target });
    }
    let clock = Instant::now();
    let mut engine = Engine::new(graph, agents, controllers, cfg);
    engine.start();
    engine.run()?;
    let mut result = engine.finish()?;
    result.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(result)
}

impl<'g> Engine<'g> {
    fn new(
        graph: &'g TargetGraph,
        starts: &[AgentStart],
        controllers: Vec<Box<dyn Controller>>,
        cfg: &SimConfig,
    ) -> Self {
        let model = cfg.noise.active();
        let m = cfg.noise.m;
        let seed = cfg.seed;
        let targets = graph
            .targets()
            .iter()
            .map(|t| {
                let mut growth = (model == NoiseModel::GrowthRate).then(|| stream(seed, Channel::Growth, t.id));
                let a = match growth.as_mut() {
                    Some(rng) => t.a * uniform(rng, 1.0 - m, 1.0 + m),
                    None => t.a,
                };
                TargetRt {
                    state: TargetState::new(t.r0, a, t.b, 0, 0.0),
                    a,
                    n: 0,
                    committed: 0,
                    crossing_gen: 0,
                    growth,
                    shock: (model == NoiseModel::StateShock).then(|| stream(seed, Channel::Shock, t.id)),
                    drift: (model == NoiseModel::Location)
                        .then(|| Drift::new(t.position, cfg.noise.radius, m, stream(seed, Channel::Location, t.id))),
                }
            })
            .collect();
        let agents = starts
            .iter()
            .map(|s| AgentRt {
                id: s.id,
                at: s.target,
                mode: Mode::Active,
                generation: 0,
                partition: None,
                visit: 0,
                speed: (model == NoiseModel::Speed).then(|| stream(seed, Channel::Speed, s.id)),
                channel: (model == NoiseModel::Channel).then(|| stream(seed, Channel::Observation, s.id)),
            })
            .collect();
        Self {
            graph,
            cfg: *cfg,
            model,
            transit: TransitTable::from_graph(graph),
            targets,
            agents,
            controllers,
            queue: EventQueue::default(),
            now: 0.0,
            events: Vec::new(),
            breakpoints: graph.targets().iter().map(|t| vec![(0.0, t.r0)]).collect(),
            visits: Vec::new(),
            decisions: Vec::new(),
            max_dwelling: 0,
            max_committed: 0,
        }
    }

    fn r_at(&self, i: usize, t: f64) -> f64 {
        let s = &self.targets[i].state;
        (s.r + s.rdot * (t - s.last_event_time)).max(0.0)
    }

    fn snapshot(&self) -> Vec<f64> {
        (0..self.targets.len()).map(|i| self.r_at(i, self.now)).collect()
    }

    fn log(&mut self, kind: EventKind, agent: Option<usize>, target: usize) {
        let r = self.snapshot();
        self.events.push(EventRecord {
            time: self.now,
            kind,
            agent: agent.map(|a| self.agents[a].id),
            target: self.graph.target(target).id,
            r,
        });
    }

    fn breakpoint(&mut self, i: usize, t: f64, r: f64) {
        let list = &mut self.breakpoints[i];
        if list.last() != Some(&(t, r)) {
            list.push((t, r));
        }
    }

    /// Applies a target-local change at the current time: an optional new uncertainty value and a
    /// change in the number of dwelling agents. Reschedules the zero crossing.
    fn update_target(&mut self, i: usize, jump: Option<f64>, dn: i32) {
        let t = self.now;
        let before = self.r_at(i, t);
        self.breakpoint(i, t, before);
        let after = jump.unwrap_or(before);
        self.breakpoint(i, t, after);
        let m = self.cfg.noise.m;
        let nominal = self.graph.target(i);
        let rt = &mut self.targets[i];
        rt.n = rt.n.checked_add_signed(dn).expect("dwelling count stays nonnegative");
        if let Some(rng) = rt.growth.as_mut() {
            rt.a = nominal.a * uniform(rng, 1.0 - m, 1.0 + m);
        }
        rt.state = TargetState::new(after, rt.a, nominal.b, rt.n, t);
        rt.crossing_gen += 1;
        self.max_dwelling = self.max_dwelling.max(rt.n);
        self.schedule_crossing(i);
    }

    fn schedule_crossing(&mut self, i: usize) {
        let rt = &self.targets[i];
        let s = rt.state;
        if s.rdot < 0.0 && s.r > 0.0 {
            let tz = s.last_event_time + s.r / -s.rdot;
            if tz < self.cfg.t_end {
                self.queue.push(tz, EventKind::ZeroCrossing, None, i, rt.crossing_gen);
            }
        }
    }

    fn crossing_time(&self, i: usize) -> f64 {
        let s = self.targets[i].state;
        if s.rdot < 0.0 {
            s.last_event_time + s.r / -s.rdot
        } else {
            f64::INFINITY
        }
    }

    fn start(&mut self) {
        let m = self.targets.len();
        for i in 0..m {
            self.schedule_crossing(i);
            self.schedule_shock(i);
        }
        for a in 0..self.agents.len() {
            let i = self.agents[a].at;
            self.visits.push(Visit {
                agent: self.agents[a].id,
                target: self.graph.target(i).id,
                arrive: 0.0,
                depart: None,
            });
            self.agents[a].visit = self.visits.len() - 1;
            self.targets[i].committed += 1;
            self.update_target(i, None, 1);
        }
        self.max_committed = self.targets.iter().map(|t| t.committed).max().unwrap_or(0);
        for i in 0..m {
            let group: Vec<usize> = (0..self.agents.len()).filter(|&a| self.agents[a].at == i).collect();
            if group.len() > 1 {
                let nb = self.graph.neighbors(i);
                for (rank, &a) in group.iter().enumerate() {
                    let part =
                        nb.iter().enumerate().filter(|(k, _)| k % group.len() == rank).map(|(_, &j)| j).collect();
                    self.agents[a].partition = Some(part);
                }
            }
        }
        for a in 0..self.agents.len() {
            let i = self.agents[a].at;
            self.log(EventKind::Arrival, Some(a), i);
        }
        for a in 0..self.agents.len() {
            self.resume(a);
        }
    }

    fn schedule_shock(&mut self, i: usize) {
        let lambda = self.cfg.noise.lambda;
        if let Some(rng) = self.targets[i].shock.as_mut() {
            let at = self.now + exponential(rng, lambda);
            if at < self.cfg.t_end {
                self.queue.push(at, EventKind::NoiseShock, None, i, 0);
            }
        }
    }

    fn run(&mut self) -> Result<(), SimError> {
        let mut processed = 0usize;
        while let Some(ev) = self.queue.pop() {
            if ev.time >= self.cfg.t_end {
                break;
            }
            if !self.is_current(&ev) {
                continue;
            }
            processed += 1;
            if processed > self.cfg.max_events {
                return Err(SimError::Zeno { limit: self.cfg.max_events, time: ev.time });
            }
            self.now = ev.time;
            self.handle(ev);
        }
        Ok(())
    }

    fn is_current(&self, ev: &Pending) -> bool {
        match ev.kind {
            EventKind::ZeroCrossing => ev.generation == self.targets[ev.target].crossing_gen,
            EventKind::ActiveEnd | EventKind::IdleEnd | EventKind::TransitEnd => {
                ev.generation == self.agents[ev.agent.expect("agent event")].generation
            }
            _ => true,
        }
    }

    fn handle(&mut self, ev: Pending) {
        let i = ev.target;
        match ev.kind {
            EventKind::ZeroCrossing => {
                self.update_target(i, Some(0.0), 0);
                self.log(EventKind::ZeroCrossing, None, i);
                for a in 0..self.agents.len() {
                    if self.agents[a].at == i && self.agents[a].mode == Mode::Active {
                        self.resume(a);
                    }
                }
            }
            EventKind::Covering | EventKind::Uncovering => {
                let by = ev.agent.expect("coverage change has an agent");
                self.log(ev.kind, Some(by), i);
                for a in 0..self.agents.len() {
                    if a != by && self.agents[a].mode != Mode::Transit && self.graph.is_neighbor(self.agents[a].at, i) {
                        self.resume(a);
                    }
                }
            }
            EventKind::ActiveEnd | EventKind::IdleEnd => {
                let a = ev.agent.expect("agent event");
                self.log(ev.kind, Some(a), i);
                self.agents[a].generation += 1;
                if let Some(d) = self.decide(a, Form::Departure) {
                    self.depart(a, d.j);
                }
            }
            EventKind::TransitEnd => {
                let a = ev.agent.expect("agent event");
                self.log(EventKind::TransitEnd, Some(a), i);
                self.arrive(a, i);
            }
            EventKind::NoiseShock => {
                let r = self.r_at(i, self.now);
                let m = self.cfg.noise.m;
                let jump = uniform(self.targets[i].shock.as_mut().expect("shock stream"), -m, m);
                self.update_target(i, Some((r + jump).max(0.0)), 0);
                self.schedule_shock(i);
                self.log(EventKind::NoiseShock, None, i);
                for a in 0..self.agents.len() {
                    let at = self.agents[a].at;
                    if self.agents[a].mode != Mode::Transit && (at == i || self.graph.is_neighbor(at, i)) {
                        self.resume(a);
                    }
                }
            }
            EventKind::Arrival => unreachable!("arrivals are never queued"),
        }
    }

    /// Re-solves the problem matching the agent's situation at its current target.
    fn resume(&mut self, a: usize) {
        let i = self.agents[a].at;
        self.agents[a].generation += 1;
        let generation = self.agents[a].generation;
        if self.r_at(i, self.now) > 0.0 {
            self.agents[a].mode = Mode::Active;
            if let Some(d) = self.decide(a, Form::Active) {
                let end = self.now + d.u_i;
                if end < self.crossing_time(i) - 1e-9 {
                    self.queue.push(end, EventKind::ActiveEnd, Some(a), i, generation);
                }
            }
        } else {
            self.agents[a].mode = Mode::Idle;
            if let Some(d) = self.decide(a, Form::Idle) {
                let end = self.now + d.v_i;
                if end.is_finite() {
                    self.queue.push(end, EventKind::IdleEnd, Some(a), i, generation);
                }
            }
        }
    }

    fn observe(&mut self, a: usize) -> Vec<f64> {
        let mut r = self.snapshot();
        let i = self.agents[a].at;
        let m = self.cfg.noise.m;
        if let Some(rng) = self.agents[a].channel.as_mut() {
            for (k, v) in r.iter_mut().enumerate() {
                if k != i {
                    *v = (*v + uniform(rng, -m, m)).max(0.0);
                }
            }
        }
        r
    }

    fn refresh_transit(&mut self) {
        if self.model != NoiseModel::Location {
            return;
        }
        let t = self.now;
        for e in self.graph.edges() {
            let p = self.targets[e.from].drift.as_mut().expect("drift").at(t);
            let q = self.targets[e.to].drift.as_mut().expect("drift").at(t);
            self.transit.set(e.from, e.to, (distance(p, q) / e.speed).max(f64::MIN_POSITIVE));
        }
    }

    fn decide(&mut self, a: usize, form: Form) -> Option<ControlDecision> {
        let t = self.now;
        let i = self.agents[a].at;
        let horizon = self.cfg.horizon.min(self.cfg.t_end - t);
        let r = self.observe(a);
        self.refresh_transit();
        let covered = (0..self.targets.len()).map(|k| self.targets[k].committed > u32::from(k == i)).collect();
        let Ok(mut ctx) = RhcpContext::new(self.graph, &self.transit, i, t, horizon, r, covered) else {
            return None;
        };
        if let Some(p) = &self.agents[a].partition {
            ctx.candidates.retain(|j| p.contains(j));
        }
        let ctl = &mut self.controllers[a];
        let d = match form {
            Form::Active => ctl.plan_active(&ctx),
            Form::Idle => ctl.plan_idle(&ctx),
            Form::Departure => ctl.plan_departure(&ctx),
        };
        let ids = |v: &[usize]| v.iter().map(|&k| self.graph.target(k).id).collect::<Vec<_>>();
        self.decisions.push(DecisionRecord {
            time: t,
            agent: self.agents[a].id,
            target: self.graph.target(i).id,
            form,
            horizon,
            candidates: ids(&ctx.candidates),
            next: d.map(|d| self.graph.target(d.j).id),
            u_i: d.map_or(f64::NAN, |d| d.u_i),
            v_i: d.map_or(f64::NAN, |d| d.v_i),
            w: d.map_or(f64::NAN, |d| d.w),
            transit: None,
        });
        d
    }

    fn depart(&mut self, a: usize, j: usize) {
        let t = self.now;
        let i = self.agents[a].at;
        let edge = self.graph.edge(i, j).expect("decisions follow edges").clone();
        let rho = match self.model {
            NoiseModel::Speed => {
                let m = self.cfg.noise.m;
                let zeta = uniform(self.agents[a].speed.as_mut().expect("speed stream"), 1.0 - m, 1.0 + m);
                edge.length / (edge.speed * zeta.max(MIN_SPEED_FACTOR))
            }
            NoiseModel::Location => {
                let from = self.targets[i].drift.as_mut().expect("drift").at(t);
                pursue(from, t, edge.speed, self.targets[j].drift.as_mut().expect("drift")) - t
            }
            _ => edge.rho,
        };
        if let Some(last) = self.decisions.last_mut() {
            last.transit = Some(rho);
        }
        let visit = self.agents[a].visit;
        self.visits[visit].depart = Some(t);
        self.targets[i].committed -= 1;
        self.update_target(i, None, -1);
        self.targets[j].committed += 1;
        self.max_committed = self.max_committed.max(self.targets[j].committed);
        let agent = &mut self.agents[a];
        agent.mode = Mode::Transit;
        agent.at = j;
        agent.partition = None;
        agent.generation += 1;
        let generation = agent.generation;
        self.queue.push(t + rho, EventKind::TransitEnd, Some(a), j, generation);
        self.queue.push(t, EventKind::Covering, Some(a), j, 0);
        self.queue.push(t, EventKind::Uncovering, Some(a), i, 0);
    }

    fn arrive(&mut self, a: usize, j: usize) {
        self.update_target(j, None, 1);
        self.visits.push(Visit {
            agent: self.agents[a].id,
            target: self.graph.target(j).id,
            arrive: self.now,
            depart: None,
        });
        self.agents[a].visit = self.visits.len() - 1;
        self.log(EventKind::Arrival, Some(a), j);
        self.resume(a);
    }

    fn finish(mut self) -> Result<SimulationResult, SimError> {
        let t_end = self.cfg.t_end;
        self.now = t_end;
        for i in 0..self.targets.len() {
            let r = self.r_at(i, t_end);
            self.breakpoint(i, t_end, r);
        }
        let j_t = accumulate_objective(&self.breakpoints, t_end).map_err(|k| SimError::Gap(self.graph.target(k).id))?;
        Ok(SimulationResult {
            j_t,
            t_end,
            target_ids: self.graph.targets().iter().map(|t| t.id).collect(),
            agent_ids: self.agents.iter().map(|a| a.id).collect(),
            events: self.events,
            breakpoints: self.breakpoints,
            visits: self.visits,
            decisions: self.decisions,
            max_dwelling: self.max_dwelling,
            max_committed: self.max_committed,
            wall_seconds: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placement_spreads_agents() {
        assert_eq!(placement(6, &[None; 2]), vec![0, 3]);
        assert_eq!(placement(6, &[None; 4]), vec![0, 2, 4, 1]);
        assert_eq!(placement(5, &[None; 5]), vec![0, 1, 2, 3, 4]);
        assert_eq!(placement(3, &[]), Vec::<usize>::new());
        assert_eq!(placement(2, &[None; 4]), vec![0, 1, 0, 1]);
        assert_eq!(placement(4, &[None, Some(2), None]), vec![0, 2, 3]);
    }
}
