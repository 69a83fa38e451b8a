use thiserror::Error;

/// A monitored target with linear uncertainty growth and removal rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub id: u32,
    pub position: [f64; 2],
    /// Uncertainty growth rate while unattended.
    pub a: f64,
    /// Uncertainty removal rate per dwelling agent.
    pub b: f64,
    /// Initial uncertainty.
    pub r0: f64,
}

/// A directed travel edge between two target indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Nominal transit time.
    pub rho: f64,
    /// Path length used by the speed and location noise models.
    pub length: f64,
    /// Agent speed along the edge.
    pub speed: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("target {id}: growth rate A={a} must satisfy 0 <= A < B={b}")]
    RateOrdering { id: u32, a: f64, b: f64 },
    #[error("target {id}: initial uncertainty {r0} must be finite and nonnegative")]
    InitialUncertainty { id: u32, r0: f64 },
    #[error("target {id}: position must be finite")]
    Position { id: u32 },
    #[error("duplicate target id {0}")]
    DuplicateTarget(u32),
    #[error("edge references unknown target index {0}")]
    UnknownTarget(usize),
    #[error("self loop at target index {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({from}, {to}): transit time {rho} must be finite and positive")]
    Transit { from: usize, to: usize, rho: f64 },
}

/// Immutable target network. Targets are addressed by dense indices `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetGraph {
    targets: Vec<Target>,
    edges: Vec<Edge>,
    neighbors: Vec<Vec<usize>>,
    edge_index: Vec<Vec<(usize, usize)>>,
}

impl TargetGraph {
    pub fn new(targets: Vec<Target>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let m = targets.len();
        let mut ids: Vec<u32> = targets.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateTarget(w[0]));
        }
        for t in &targets {
            if !(t.a.is_finite() && t.b.is_finite() && t.a >= 0.0 && t.a < t.b) {
                return Err(GraphError::RateOrdering { id: t.id, a: t.a, b: t.b });
            }
            if !(t.r0.is_finite() && t.r0 >= 0.0) {
                return Err(GraphError::InitialUncertainty { id: t.id, r0: t.r0 });
            }
            if !t.position.iter().all(|p| p.is_finite()) {
                return Err(GraphError::Position { id: t.id });
            }
        }
        let mut edge_index: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        for (k, e) in edges.iter().enumerate() {
            for &v in &[e.from, e.to] {
                if v >= m {
                    return Err(GraphError::UnknownTarget(v));
                }
            }
            if e.from == e.to {
                return Err(GraphError::SelfLoop(e.from));
            }
            if !(e.rho.is_finite() && e.rho > 0.0) {
                return Err(GraphError::Transit { from: e.from, to: e.to, rho: e.rho });
            }
            if edge_index[e.from].iter().any(|&(to, _)| to == e.to) {
                return Err(GraphError::DuplicateEdge(e.from, e.to));
            }
            edge_index[e.from].push((e.to, k));
        }
        for list in &mut edge_index {
            list.sort_unstable();
        }
        let neighbors = edge_index.iter().map(|l| l.iter().map(|&(to, _)| to).collect()).collect();
        Ok(Self { targets, edges, neighbors, edge_index })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn target(&self, i: usize) -> &Target {
        &self.targets[i]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-neighbors of `i`, sorted by index.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn is_neighbor(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// The closed neighborhood `N_i ∪ {i}`, sorted.
    pub fn closed_neighborhood(&self, i: usize) -> Vec<usize> {
        let mut v = self.neighbors[i].clone();
        v.push(i);
        v.sort_unstable();
        v
    }

    /// The closed neighborhood of `i` together with every neighbor's out-neighbors, sorted.
    pub fn two_hop_neighborhood(&self, i: usize) -> Vec<usize> {
        let mut v = self.closed_neighborhood(i);
        for &j in &self.neighbors[i] {
            v.extend_from_slice(&self.neighbors[j]);
        }
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        self.edge_index[i].binary_search_by_key(&j, |&(to, _)| to).ok().map(|k| &self.edges[self.edge_index[i][k].1])
    }

    pub fn rho(&self, i: usize, j: usize) -> Option<f64> {
        self.edge(i, j).map(|e| e.rho)
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.targets.iter().position(|t| t.id == id)
    }

    /// Breadth-first check that every target is reachable from target 0 along directed edges
    /// and that target 0 is reachable from every target.
    pub fn is_strongly_connected(&self) -> bool {
        let m = self.len();
        if m == 0 {
            return true;
        }
        let reach = |adj: &dyn Fn(usize) -> Vec<usize>| {
            let mut seen = vec![false; m];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for w in adj(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        let forward = |v: usize| self.neighbors[v].clone();
        let backward = |v: usize| (0..m).filter(|&u| self.is_neighbor(u, v)).collect();
        reach(&forward) && reach(&backward)
    }
}

/// Current transit times between targets. Starts from the nominal edge values and can be
/// overwritten when targets move.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitTable {
    m: usize,
    rho: Vec<f64>,
}

impl TransitTable {
    pub fn from_graph(graph: &TargetGraph) -> Self {
        let m = graph.len();
        let mut rho = vec![f64::NAN; m * m];
        for e in graph.edges() {
            rho[e.from * m + e.to] = e.rho;
        }
        Self { m, rho }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.rho[i * self.m + j];
        (!v.is_nan()).then_some(v)
    }

    /// Overwrites an existing edge entry. Non-edges are left untouched.
    pub fn set(&mut self, i: usize, j: usize, rho: f64) {
        let slot = &mut self.rho[i * self.m + j];
        if !slot.is_nan() {
            *slot = rho;
        }
    }
}
