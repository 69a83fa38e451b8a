use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use pmn_core::controller::ControllerRegistry;
use pmn_core::scenario::{generate, load_scenario, parse_grid, sweep, RunError, ScenarioError, ScenarioFile};
use pmn_core::sim::{write_trace, SimulationResult};
use serde_json::json;

use crate::{Command, Common};

/// A failed command: invalid input (exit 1) or an aborted simulation or output failure (exit 2).
pub enum Failure {
    Invalid(String),
    Abort(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Abort(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Abort(m) => m,
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(e) => e.into(),
            RunError::Sim(e) => Failure::Abort(format!("simulation aborted: {e}")),
        }
    }
}

fn io_failure(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Abort(format!("cannot write {}: {e}", path.display()))
}

pub fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { common, out } => run(&common, &out),
        Command::Sweep { common, axis, grid, parallel, out } => {
            let file = load(&common)?;
            let grid = parse_grid(axis, &grid).map_err(Failure::Invalid)?;
            let seeds = seeds(&common, file.seed)?;
            if parallel == Some(0) {
                return Err(Failure::Invalid("--parallel must be at least 1".into()));
            }
            let report = sweep(&file, &ControllerRegistry::default(), axis, &grid, &seeds, parallel)?;
            fs::create_dir_all(&out).map_err(io_failure(&out))?;
            let csv = out.join("sweep.csv");
            let mut w = BufWriter::new(fs::File::create(&csv).map_err(io_failure(&csv))?);
            report.write_csv(&mut w).and_then(|_| w.flush()).map_err(io_failure(&csv))?;
            let json_path = out.join("sweep.json");
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            fs::write(&json_path, text).map_err(io_failure(&json_path))?;
            let stdout = io::stdout();
            let _ = report.write_csv(stdout.lock());
            if let (Some(h), Some(r)) = (report.half_mission, report.half_mission_ratio) {
                println!("J_T(H=T/2) = {h}, ratio to minimum = {r}");
            }
            Ok(())
        }
        Command::Generate { topology, targets, agents, seed, out } => {
            let file = generate(topology, targets, agents, seed)?;
            let text = file.to_json() + "\n";
            match out {
                Some(path) => fs::write(&path, text).map_err(io_failure(&path)),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Validate { scenario } => {
            let file = load_scenario(&scenario)?;
            let registry = ControllerRegistry::default();
            file.controllers(&registry)?;
            let g = file.graph()?;
            println!(
                "ok: {} targets, {} edges, {} agents, controller {}, T = {}, H = {}, noise {:?}",
                g.len(),
                g.edges().len(),
                file.agents.len(),
                file.controller.kind,
                file.t_end,
                file.horizon(),
                file.noise.model
            );
            Ok(())
        }
    }
}

fn load(common: &Common) -> Result<ScenarioFile, Failure> {
    let mut f = load_scenario(&common.scenario)?;
    if let Some(c) = &common.controller {
        f.controller.kind = c.clone();
    }
    if let Some(h) = common.h {
        f.controller.h = Some(h);
    }
    if let Some(a) = common.alpha {
        f.controller.alpha = a;
    }
    if let Some(b) = common.beta {
        f.controller.beta = b;
    }
    if let Some(n) = common.noise {
        f.noise.model = n;
    }
    if let Some(m) = common.m {
        f.noise.m = m;
    }
    if let Some(l) = common.lambda {
        f.noise.lambda = l;
    }
    f.validate()?;
    Ok(f)
}

/// Parses `a,b,c` or `lo..hi`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    let bad = |e: std::num::ParseIntError| format!("bad seed list {text:?}: {e}");
    let seeds: Vec<u64> = match text.split_once("..") {
        Some((lo, hi)) => (lo.trim().parse().map_err(bad)?..hi.trim().parse().map_err(bad)?).collect(),
        None => text.split(',').map(|s| s.trim().parse().map_err(bad)).collect::<Result<_, _>>()?,
    };
    if seeds.is_empty() {
        return Err(format!("seed list {text:?} is empty"));
    }
    Ok(seeds)
}

fn seeds(common: &Common, default: u64) -> Result<Vec<u64>, Failure> {
    match &common.seeds {
        Some(s) => parse_seeds(s).map_err(Failure::Invalid),
        None => Ok(vec![default]),
    }
}

fn summary(file: &ScenarioFile, res: &SimulationResult) -> serde_json::Value {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &res.events {
        *counts.entry(e.kind.as_str()).or_default() += 1;
    }
    let visits: BTreeMap<String, Vec<u32>> =
        res.agent_ids.iter().map(|&a| (a.to_string(), res.visit_sequence(a))).collect();
    json!({
        "J_T": res.j_t,
        "T": res.t_end,
        "H": file.horizon(),
        "controller": file.controller.kind,
        "seed": file.seed,
        "noise": file.noise,
        "events": res.events.len(),
        "event_counts": counts,
        "decisions": res.decisions.len(),
        "visits": visits,
        "max_dwelling": res.max_dwelling,
        "max_committed": res.max_committed,
        "wall_seconds": res.wall_seconds,
    })
}

fn run(common: &Common, out: &Path) -> Result<(), Failure> {
    let base = load(common)?;
    let seeds = seeds(common, base.seed)?;
    let registry = ControllerRegistry::default();
    fs::create_dir_all(out).map_err(io_failure(out))?;
    for &seed in &seeds {
        let file = ScenarioFile { seed, ..base.clone() };
        let res = file.run(&registry)?;
        let suffix = if seeds.len() == 1 { String::new() } else { format!("-{seed}") };
        let trace = out.join(format!("trace{suffix}.csv"));
        let mut w = BufWriter::new(fs::File::create(&trace).map_err(io_failure(&trace))?);
        write_trace(&res, &mut w).and_then(|_| w.flush()).map_err(io_failure(&trace))?;
        let result = out.join(format!("result{suffix}.json"));
        let text = serde_json::to_string_pretty(&summary(&file, &res)).expect("summary serializes");
        fs::write(&result, text + "\n").map_err(io_failure(&result))?;
        println!("seed {seed}: J_T = {}", res.j_t);
    }
    Ok(())
}
