use thiserror::Error;

use crate::model::{Member, NeighborhoodError, TargetGraph, TransitTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RhcpError {
    #[error("planning horizon must be positive, got {0}")]
    Horizon(f64),
    #[error("transit time exceeds the planning horizon")]
    Infeasible,
    #[error("target {0} is not a candidate of the current target")]
    NotCandidate(usize),
    #[error("the agent is not idle: uncertainty {0} at the current target is positive")]
    NotIdle(f64),
    #[error("removal rate must exceed growth rate (A={a}, B={b})")]
    RateOrdering { a: f64, b: f64 },
    #[error("weight {0} outside [0, 1]")]
    Weight(f64),
    #[error(transparent)]
    Neighborhood(#[from] NeighborhoodError),
}

/// Local information an agent at target `i` uses for one decision.
#[derive(Debug, Clone)]
pub struct RhcpContext<'a> {
    pub graph: &'a TargetGraph,
    pub transit: &'a TransitTable,
    pub i: usize,
    pub time: f64,
    /// Planning horizon bound, already truncated to the remaining mission time.
    pub horizon: f64,
    /// Uncertainty snapshot as seen by the agent, indexed by target.
    pub r: Vec<f64>,
    /// Neighbors of `i` that may be chosen as the next visit.
    pub candidates: Vec<usize>,
    /// Targets with a committed visitor other than this agent.
    pub covered: Vec<bool>,
}

impl<'a> RhcpContext<'a> {
    /// Builds a context whose candidates are the uncovered neighbors of `i`.
    pub fn new(
        graph: &'a TargetGraph,
        transit: &'a TransitTable,
        i: usize,
        time: f64,
        horizon: f64,
        r: Vec<f64>,
        covered: Vec<bool>,
    ) -> Result<Self, RhcpError> {
        if !(horizon > 0.0) {
            return Err(RhcpError::Horizon(horizon));
        }
        let candidates = graph.neighbors(i).iter().copied().filter(|&j| !covered[j]).collect();
        Ok(Self { graph, transit, i, time, horizon, r, candidates, covered })
    }

    pub fn rho(&self, i: usize, j: usize) -> Option<f64> {
        self.transit.get(i, j)
    }

    pub fn a(&self, m: usize) -> f64 {
        self.graph.target(m).a
    }

    pub fn b(&self, m: usize) -> f64 {
        self.graph.target(m).b
    }

    /// Transit time to candidate `j`, or an error if `j` is not a candidate or out of reach.
    pub fn reachable(&self, j: usize) -> Result<f64, RhcpError> {
        if !self.candidates.contains(&j) {
            return Err(RhcpError::NotCandidate(j));
        }
        let rho = self.rho(self.i, j).ok_or(RhcpError::NotCandidate(j))?;
        if rho > self.horizon {
            return Err(RhcpError::Infeasible);
        }
        Ok(rho)
    }

    pub fn members(&self, set: &[usize]) -> Vec<Member> {
        set.iter().map(|&m| Member::new(m, self.r[m], self.a(m), self.b(m))).collect()
    }
}

/// Active time that drives `r` to zero after `lead` time units of growth.
pub fn active_time_bound(r: f64, a: f64, b: f64, lead: f64) -> Result<f64, RhcpError> {
    if !(b > a) {
        return Err(RhcpError::RateOrdering { a, b });
    }
    Ok((r + a * lead) / (b - a))
}

/// `active_time_bound` as an affine function of an extra lead: `(intercept, slope)`.
pub fn active_time_bound_affine(r: f64, a: f64, b: f64, lead: f64) -> Result<(f64, f64), RhcpError> {
    Ok((active_time_bound(r, a, b, lead)?, a / (b - a)))
}

/// Planned visit extending past the next target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookahead {
    pub k: usize,
    pub u_k: f64,
    pub v_k: f64,
}

/// Decision of one receding-horizon step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlDecision {
    /// Remaining active time at the current target.
    pub u_i: f64,
    /// Idle time at the current target after its uncertainty reaches zero.
    pub v_i: f64,
    pub j: usize,
    pub u_j: f64,
    pub v_j: f64,
    pub lookahead: Option<Lookahead>,
    /// Planning horizon induced by the decision.
    pub w: f64,
    pub cost: f64,
}

/// Lowest-cost candidate; costs within `1e-12` relative tie and the lower index wins.
pub fn next_visit(costs: &[(usize, f64)]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(j, c) in costs {
        if !c.is_finite() {
            continue;
        }
        best = match best {
            None => Some((j, c)),
            Some((bj, bc)) => {
                let tol = 1e-12 * bc.abs().max(c.abs()).max(1.0);
                if c < bc - tol || (c <= bc + tol && j < bj) {
                    Some((j, c))
                } else {
                    Some((bj, bc))
                }
            }
        };
    }
    best.map(|(j, _)| j)
}
