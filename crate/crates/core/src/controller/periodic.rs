use std::collections::HashMap;

use crate::rhcp::{ControlDecision, RhcpContext};

use super::Controller;

/// Clears the current target, then moves on to uncovered neighbors in turn.
#[derive(Debug, Default)]
pub struct PeriodicBaseline {
    rotor: HashMap<usize, usize>,
}

impl PeriodicBaseline {
    fn peek(&self, ctx: &RhcpContext) -> Option<usize> {
        if ctx.candidates.is_empty() {
            return None;
        }
        let turn = self.rotor.get(&ctx.i).copied().unwrap_or(0);
        Some(ctx.candidates[turn % ctx.candidates.len()])
    }

    fn hold(&self, ctx: &RhcpContext, u_i: f64) -> Option<ControlDecision> {
        let j = self.peek(ctx)?;
        let rho = ctx.rho(ctx.i, j)?;
        Some(ControlDecision { u_i, v_i: 0.0, j, u_j: 0.0, v_j: 0.0, lookahead: None, w: u_i + rho, cost: f64::NAN })
    }
}

impl Controller for PeriodicBaseline {
    fn name(&self) -> &'static str {
        "periodic_baseline"
    }

    fn plan_active(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        let i = ctx.i;
        let u = ctx.r[i] / (ctx.b(i) - ctx.a(i));
        self.hold(ctx, u)
    }

    fn plan_idle(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        self.hold(ctx, 0.0)
    }

    fn plan_departure(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        let d = self.hold(ctx, 0.0)?;
        *self.rotor.entry(ctx.i).or_insert(0) += 1;
        Some(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Edge, Target, TargetGraph, TransitTable};

    #[test]
    fn rotates_through_neighbors() {
        let targets = (0..3).map(|k| Target { id: k, position: [0.0; 2], a: 1.0, b: 10.0, r0: 0.5 }).collect();
        let edges = [(1, 0), (1, 2)]
            .iter()
            .map(|&(f, t)| Edge { from: f, to: t, rho: 1.0, length: 50.0, speed: 50.0 })
            .collect();
        let g = TargetGraph::new(targets, edges).unwrap();
        let t = TransitTable::from_graph(&g);
        let ctx = RhcpContext::new(&g, &t, 1, 0.0, 10.0, vec![0.0, 0.9, 0.0], vec![false; 3]).unwrap();
        let mut c = PeriodicBaseline::default();
        let a = c.plan_active(&ctx).unwrap();
        assert!((a.u_i - 0.1).abs() < 1e-15);
        let seq: Vec<usize> = (0..4).map(|_| c.plan_departure(&ctx).unwrap().j).collect();
        assert_eq!(seq, vec![0, 2, 0, 2]);
    }
}
