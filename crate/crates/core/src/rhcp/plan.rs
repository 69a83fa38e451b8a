use super::cases::{solve_extended, solve_rhcp1, solve_rhcp2, two_hop_shortcut_score, TwoHopPlan};
use super::context::{next_visit, ControlDecision, Lookahead, RhcpContext, RhcpError};
use super::instance::{OneHop, Rest, Site, TwoHop, TwoHopWeights};
use super::rhcp3::{denominator_free, shortcut_plan, shortcut_score, OneHopPlan};

impl RhcpContext<'_> {
    fn site(&self, m: usize) -> Site {
        Site { r: self.r[m], a: self.a(m), b: self.b(m) }
    }

    /// One-hop instance for moving from `i` to candidate `j`.
    pub fn one_hop(&self, j: usize) -> Result<OneHop, RhcpError> {
        let rho = self.reachable(j)?;
        let mut rest = Rest::default();
        for &m in self.graph.neighbors(self.i) {
            if m != j {
                rest.r += self.r[m];
                rest.a += self.a(m);
            }
        }
        Ok(OneHop { i: self.site(self.i), j: self.site(j), rest, rho, horizon: self.horizon })
    }

    /// Two-hop instance for the sequence `i -> j -> k`.
    pub fn two_hop(&self, j: usize, k: usize) -> Result<TwoHop, RhcpError> {
        let rho_ij = self.reachable(j)?;
        let rho_jk = self.rho(j, k).ok_or(RhcpError::NotCandidate(k))?;
        if k != self.i && self.covered[k] {
            return Err(RhcpError::NotCandidate(k));
        }
        if rho_ij + rho_jk > self.horizon {
            return Err(RhcpError::Infeasible);
        }
        let mut rest = Rest::default();
        for m in self.graph.two_hop_neighborhood(self.i) {
            if m != j && m != k {
                rest.r += self.r[m];
                rest.a += self.a(m);
            }
        }
        Ok(TwoHop { j: self.site(j), k: self.site(k), rest, rho_ij, rho_jk, horizon: self.horizon })
    }

    /// Feasible `(j, k)` sequences in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &j in &self.candidates {
            for &k in self.graph.neighbors(j) {
                if self.two_hop(j, k).is_ok() {
                    out.push((j, k));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Size of the closed neighborhood of the current target.
    pub fn closed_size(&self) -> usize {
        self.graph.neighbors(self.i).len() + 1
    }

    /// Nominal `α = 1/|N̄_i|²`.
    pub fn nominal_alpha(&self) -> f64 {
        1.0 / (self.closed_size() as f64).powi(2)
    }

    /// Nominal `β = 1/|N̄_i|`.
    pub fn nominal_beta(&self) -> f64 {
        1.0 / self.closed_size() as f64
    }
}

fn decision(j: usize, rho: f64, p: OneHopPlan) -> ControlDecision {
    ControlDecision {
        u_i: p.u_i,
        v_i: p.v_i,
        j,
        u_j: p.u_j,
        v_j: p.v_j,
        lookahead: None,
        w: p.u_i + p.v_i + rho + p.u_j + p.v_j,
        cost: p.cost,
    }
}

/// Solves the one-hop problem for every candidate and keeps the cheapest (lower index on ties).
pub fn plan_one_hop(
    ctx: &RhcpContext,
    solve: impl Fn(&OneHop) -> Result<OneHopPlan, RhcpError>,
) -> Option<ControlDecision> {
    let mut plans = Vec::new();
    for &j in &ctx.candidates {
        let Ok(x) = ctx.one_hop(j) else { continue };
        if let Ok(p) = solve(&x) {
            plans.push((j, x.rho, p));
        }
    }
    let costs: Vec<(usize, f64)> = plans.iter().map(|&(j, _, p)| (j, p.cost)).collect();
    let best = next_visit(&costs)?;
    plans.into_iter().find(|&(j, _, _)| j == best).map(|(j, rho, p)| decision(j, rho, p))
}

/// Decision while the current target is still being cleared.
pub fn plan_active(ctx: &RhcpContext) -> Option<ControlDecision> {
    if ctx.r[ctx.i] > 0.0 {
        plan_one_hop(ctx, solve_rhcp1)
    } else {
        plan_one_hop(ctx, solve_rhcp2)
    }
}

/// Decision while idling at a cleared target.
pub fn plan_idle(ctx: &RhcpContext) -> Option<ControlDecision> {
    let mut cleared = ctx.clone();
    cleared.r[ctx.i] = 0.0;
    plan_one_hop(&cleared, solve_rhcp2)
}

/// Next visit chosen by the `α = 0` ranking, with a leave-at-once plan.
pub fn plan_shortcut(ctx: &RhcpContext) -> Option<ControlDecision> {
    let mut scored = Vec::new();
    for &j in &ctx.candidates {
        if let Ok(x) = ctx.one_hop(j) {
            scored.push((j, x));
        }
    }
    let costs: Vec<(usize, f64)> = scored.iter().map(|(j, x)| (*j, shortcut_score(x))).collect();
    let best = next_visit(&costs)?;
    scored.into_iter().find(|(j, _)| *j == best).map(|(j, x)| decision(j, x.rho, shortcut_plan(&x)))
}

/// Next visit of the controller without horizon normalisation: always the closest candidate.
pub fn plan_denominator_free(ctx: &RhcpContext) -> Option<ControlDecision> {
    let mut by_rho = Vec::new();
    for &j in &ctx.candidates {
        if let Ok(x) = ctx.one_hop(j) {
            by_rho.push((j, x.rho, denominator_free(&x)));
        }
    }
    let keys: Vec<(usize, f64)> = by_rho.iter().map(|&(j, rho, _)| (j, rho)).collect();
    let best = next_visit(&keys)?;
    by_rho.into_iter().find(|&(j, _, _)| j == best).map(|(j, rho, p)| decision(j, rho, p))
}

fn two_hop_decision(j: usize, k: usize, x: &TwoHop, p: TwoHopPlan) -> ControlDecision {
    ControlDecision {
        u_i: 0.0,
        v_i: 0.0,
        j,
        u_j: p.u_j,
        v_j: p.v_j,
        lookahead: Some(Lookahead { k, u_k: p.u_k, v_k: p.v_k }),
        w: x.span() + p.u_j + p.v_j + p.u_k + p.v_k,
        cost: p.cost,
    }
}

fn pick_pair<T>(mut scored: Vec<((usize, usize), f64, T)>) -> Option<((usize, usize), T)> {
    let tol = |a: f64, b: f64| 1e-12 * a.abs().max(b.abs()).max(1.0);
    let mut best: Option<usize> = None;
    for idx in 0..scored.len() {
        let c = scored[idx].1;
        if !c.is_finite() {
            continue;
        }
        best = match best {
            None => Some(idx),
            Some(b) => {
                let bc = scored[b].1;
                if c < bc - tol(c, bc) || (c <= bc + tol(c, bc) && scored[idx].0 < scored[b].0) {
                    Some(idx)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.map(|b| {
        let (pair, _, t) = scored.swap_remove(b);
        (pair, t)
    })
}

/// Two-hop departure decision over all feasible sequences; `None` when no sequence fits.
pub fn plan_two_hop(ctx: &RhcpContext, alpha: f64, beta: f64) -> Option<ControlDecision> {
    let w = TwoHopWeights::alpha_beta(alpha, beta);
    let mut scored = Vec::new();
    for (j, k) in ctx.pairs() {
        let Ok(x) = ctx.two_hop(j, k) else { continue };
        if let Ok(p) = solve_extended(&x, w) {
            scored.push(((j, k), p.cost, (x, p)));
        }
    }
    pick_pair(scored).map(|((j, k), (x, p))| two_hop_decision(j, k, &x, p))
}

/// Sequence chosen by the `α = β = 0` ranking, with a leave-at-once plan.
pub fn plan_two_hop_shortcut(ctx: &RhcpContext) -> Option<ControlDecision> {
    let mut scored = Vec::new();
    for (j, k) in ctx.pairs() {
        let Ok(x) = ctx.two_hop(j, k) else { continue };
        scored.push(((j, k), two_hop_shortcut_score(&x), x));
    }
    pick_pair(scored).map(|((j, k), x)| {
        let t = x.params();
        let cost = t.rtil_jk + 0.5 * t.atil_jk * x.span();
        two_hop_decision(j, k, &x, TwoHopPlan { u_j: 0.0, v_j: 0.0, u_k: 0.0, v_k: 0.0, cost })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Edge, Target, TargetGraph, TransitTable};
    use crate::rhcp::rhcp3::{solve_rhcp3, solve_rhcp3_weighted};

    fn line(rhos: &[f64]) -> TargetGraph {
        let n = rhos.len() + 1;
        let targets =
            (0..n).map(|k| Target { id: k as u32 + 1, position: [0.0; 2], a: 1.0, b: 10.0, r0: 0.5 }).collect();
        let mut edges = Vec::new();
        for (k, &rho) in rhos.iter().enumerate() {
            edges.push(Edge { from: k, to: k + 1, rho, length: rho * 50.0, speed: 50.0 });
            edges.push(Edge { from: k + 1, to: k, rho, length: rho * 50.0, speed: 50.0 });
        }
        TargetGraph::new(targets, edges).unwrap()
    }

    #[test]
    fn shortcut_example() {
        // Two neighbors of the middle target: (R = 5, ρ = 2) and (R = 1, ρ = 1), A = 1.
        let g = line(&[2.0, 1.0]);
        let t = TransitTable::from_graph(&g);
        let ctx = RhcpContext::new(&g, &t, 1, 0.0, 250.0, vec![5.0, 0.0, 1.0], vec![false; 3]).unwrap();
        let rbar = 6.0;
        let abar = 3.0;
        let score = |r: f64, rho: f64| (2.0 * rbar + abar * rho) - (2.0 * r + rho);
        let expect = if score(5.0, 2.0) <= score(1.0, 1.0) { 0 } else { 2 };
        let d = plan_shortcut(&ctx).unwrap();
        assert_eq!(d.j, expect);
        assert_eq!((d.u_j, d.v_j), (0.0, 0.0));
    }

    #[test]
    fn identical_neighbors_tie_to_lower_index() {
        let g = line(&[1.0, 1.0]);
        let t = TransitTable::from_graph(&g);
        let ctx = RhcpContext::new(&g, &t, 1, 0.0, 250.0, vec![0.5; 3], vec![false; 3]).unwrap();
        assert_eq!(plan_shortcut(&ctx).unwrap().j, 0);
        assert_eq!(plan_one_hop(&ctx, solve_rhcp3).unwrap().j, 0);
    }

    #[test]
    fn covered_neighbor_is_skipped() {
        let g = line(&[1.0, 1.0]);
        let t = TransitTable::from_graph(&g);
        let ctx = RhcpContext::new(&g, &t, 1, 0.0, 250.0, vec![0.5; 3], vec![true, false, false]).unwrap();
        assert_eq!(ctx.candidates, vec![2]);
        assert_eq!(plan_one_hop(&ctx, solve_rhcp3).unwrap().j, 2);
        let all = RhcpContext::new(&g, &t, 1, 0.0, 250.0, vec![0.5; 3], vec![true, false, true]).unwrap();
        assert!(plan_one_hop(&all, solve_rhcp3).is_none());
    }

    #[test]
    fn denominator_free_picks_nearest() {
        let g = line(&[3.0, 1.0]);
        let t = TransitTable::from_graph(&g);
        let ctx = RhcpContext::new(&g, &t, 1, 0.0, 250.0, vec![9.0, 0.0, 0.1], vec![false; 3]).unwrap();
        let d = plan_denominator_free(&ctx).unwrap();
        assert_eq!(d.j, 2);
        assert_eq!((d.u_j, d.v_j), (0.0, 0.0));
    }

    #[test]
    fn decision_horizon_within_bound() {
        let g = line(&[2.0, 1.0, 3.0]);
        let t = TransitTable::from_graph(&g);
        let ctx = RhcpContext::new(&g, &t, 1, 0.0, 4.0, vec![3.0, 0.7, 1.0, 2.0], vec![false; 4]).unwrap();
        for d in [plan_active(&ctx), plan_idle(&ctx), plan_one_hop(&ctx, solve_rhcp3), plan_two_hop(&ctx, 0.1, 0.3)] {
            let d = d.unwrap();
            assert!(d.w <= 4.0 + 1e-9, "{d:?}");
        }
    }

    #[test]
    fn two_hop_falls_back_when_no_pair_fits() {
        let g = line(&[1.0, 5.0]);
        let t = TransitTable::from_graph(&g);
        let ctx = RhcpContext::new(&g, &t, 0, 0.0, 1.5, vec![0.5; 3], vec![false; 3]).unwrap();
        assert!(plan_two_hop(&ctx, 0.1, 0.2).is_none());
        assert!(plan_one_hop(&ctx, |x| solve_rhcp3_weighted(x, 0.1)).is_some());
    }

    #[test]
    fn return_to_origin_is_a_pair() {
        let g = line(&[1.0]);
        let t = TransitTable::from_graph(&g);
        let ctx = RhcpContext::new(&g, &t, 0, 0.0, 10.0, vec![0.0, 2.0], vec![false; 2]).unwrap();
        assert_eq!(ctx.pairs(), vec![(1, 0)]);
        assert_eq!(plan_two_hop_shortcut(&ctx).unwrap().lookahead.unwrap().k, 0);
    }
}
