use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::file::{
    AgentSpec, ControllerSpec, EdgeSpec, ScenarioError, ScenarioFile, Start, TargetSpec, DEFAULT_A, DEFAULT_B,
    DEFAULT_R0, DEFAULT_T, DEFAULT_V,
};
use crate::sim::NoiseConfig;

/// Side of the square mission space.
pub const REGION: f64 = 600.0;
const MARGIN: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Line,
    Star,
    Grid,
    RandomGeometric,
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "line" => Ok(Topology::Line),
            "star" => Ok(Topology::Star),
            "grid" => Ok(Topology::Grid),
            "random-geometric" => Ok(Topology::RandomGeometric),
            _ => Err(format!("unknown topology {s:?}; known: line, star, grid, random-geometric")),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Line => "line",
            Topology::Star => "star",
            Topology::Grid => "grid",
            Topology::RandomGeometric => "random-geometric",
        })
    }
}

fn positions(topology: Topology, m: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let span = REGION - 2.0 * MARGIN;
    let center = REGION / 2.0;
    match topology {
        Topology::Line => {
            let step = span / (m.max(2) - 1) as f64;
            (0..m).map(|k| if m == 1 { [center, center] } else { [MARGIN + k as f64 * step, center] }).collect()
        }
        Topology::Star => {
            let leaves = m.saturating_sub(1).max(1) as f64;
            (0..m)
                .map(|k| {
                    if k == 0 {
                        [center, center]
                    } else {
                        let angle = 2.0 * PI * (k - 1) as f64 / leaves;
                        [center + span / 2.0 * angle.cos(), center + span / 2.0 * angle.sin()]
                    }
                })
                .collect()
        }
        Topology::Grid => {
            let cols = grid_cols(m);
            let step = span / (cols.max(2) - 1) as f64;
            (0..m).map(|k| [MARGIN + (k % cols) as f64 * step, MARGIN + (k / cols) as f64 * step]).collect()
        }
        Topology::RandomGeometric => {
            (0..m).map(|_| [rng.random::<f64>() * REGION, rng.random::<f64>() * REGION]).collect()
        }
    }
}

fn grid_cols(m: usize) -> usize {
    (m as f64).sqrt().ceil().max(1.0) as usize
}

fn connected(m: usize, pairs: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..m).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in pairs {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        parent[ra] = rb;
    }
    let r0 = root(&mut parent, 0);
    (0..m).all(|k| root(&mut parent, k) == r0)
}

fn pairs(topology: Topology, pos: &[[f64; 2]]) -> Vec<(usize, usize)> {
    let m = pos.len();
    match topology {
        Topology::Line => (1..m).map(|k| (k - 1, k)).collect(),
        Topology::Star => (1..m).map(|k| (0, k)).collect(),
        Topology::Grid => {
            let cols = grid_cols(m);
            let mut out = Vec::new();
            for k in 0..m {
                if (k + 1) % cols != 0 && k + 1 < m {
                    out.push((k, k + 1));
                }
                if k + cols < m {
                    out.push((k, k + cols));
                }
            }
            out
        }
        Topology::RandomGeometric => {
            let dist = |a: usize, b: usize| (pos[a][0] - pos[b][0]).hypot(pos[a][1] - pos[b][1]);
            let mut radius = REGION / 6.0;
            loop {
                let out: Vec<(usize, usize)> = (0..m)
                    .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
                    .filter(|&(a, b)| dist(a, b) <= radius)
                    .collect();
                if connected(m, &out) {
                    return out;
                }
                radius *= 1.1;
            }
        }
    }
}

/// A connected scenario with the default target parameters and `n` automatically placed agents.
pub fn generate(topology: Topology, m: usize, n: usize, seed: u64) -> Result<ScenarioFile, ScenarioError> {
    if m == 0 {
        return Err(ScenarioError::Generate("a scenario needs at least one target".into()));
    }
    if n > m {
        return Err(ScenarioError::Generate(format!(
            "{n} agents with automatic placement need at least {n} targets, got {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = positions(topology, m, &mut rng);
    let id = |k: usize| k as u32 + 1;
    let edges = pairs(topology, &pos)
        .into_iter()
        .map(|(a, b)| EdgeSpec {
            i: id(a),
            j: id(b),
            length: Some((pos[a][0] - pos[b][0]).hypot(pos[a][1] - pos[b][1])),
            rho: None,
            v: DEFAULT_V,
            bidirectional: true,
        })
        .collect();
    let file = ScenarioFile {
        targets: pos
            .iter()
            .enumerate()
            .map(|(k, &p)| TargetSpec { id: id(k), position: p, a: DEFAULT_A, b: DEFAULT_B, r0: DEFAULT_R0 })
            .collect(),
        edges,
        agents: (0..n).map(|k| AgentSpec { id: id(k), start: Start::Auto }).collect(),
        t_end: DEFAULT_T,
        controller: ControllerSpec { h: Some(DEFAULT_T / 2.0), ..Default::default() },
        noise: NoiseConfig::default(),
        seed,
    };
    file.validate()?;
    Ok(file)
}
