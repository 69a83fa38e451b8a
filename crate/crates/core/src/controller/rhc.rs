use crate::rhcp::{
    plan_active, plan_denominator_free, plan_idle, plan_one_hop, plan_shortcut, plan_two_hop, plan_two_hop_shortcut,
    solve_rhcp3, solve_rhcp3_weighted, ControlDecision, RhcpContext,
};

use super::{Controller, Weight};

/// Event-driven receding-horizon controller.
pub struct Rhc;

impl Controller for Rhc {
    fn name(&self) -> &'static str {
        "rhc"
    }

    fn plan_active(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_active(ctx)
    }

    fn plan_idle(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_idle(ctx)
    }

    fn plan_departure(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_one_hop(ctx, solve_rhcp3)
    }
}

fn weighted_departure(ctx: &RhcpContext, alpha: f64) -> Option<ControlDecision> {
    if alpha == 0.0 {
        plan_shortcut(ctx)
    } else {
        plan_one_hop(ctx, |x| solve_rhcp3_weighted(x, alpha))
    }
}

/// Departure decisions weight the next target by `α` and the rest of the neighborhood by
/// `1 − α`.
pub struct RhcAlpha {
    pub alpha: Weight,
}

impl Controller for RhcAlpha {
    fn name(&self) -> &'static str {
        "rhc_alpha"
    }

    fn plan_active(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_active(ctx)
    }

    fn plan_idle(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_idle(ctx)
    }

    fn plan_departure(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        weighted_departure(ctx, self.alpha.resolve(ctx.nominal_alpha()))
    }
}

/// Departure decisions plan two targets ahead with weights `α`, `β` and `1 − α − β`.
pub struct ExRhcAlphaBeta {
    pub alpha: Weight,
    pub beta: Weight,
}

impl Controller for ExRhcAlphaBeta {
    fn name(&self) -> &'static str {
        "ex_rhc_alpha_beta"
    }

    fn plan_active(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_active(ctx)
    }

    fn plan_idle(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_idle(ctx)
    }

    fn plan_departure(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        let alpha = self.alpha.resolve(ctx.nominal_alpha());
        let beta = self.beta.resolve(ctx.nominal_beta());
        let two = if alpha == 0.0 && beta == 0.0 { plan_two_hop_shortcut(ctx) } else { plan_two_hop(ctx, alpha, beta) };
        two.or_else(|| weighted_departure(ctx, alpha))
    }

    fn two_hop(&self) -> bool {
        true
    }
}

/// Departure rule without horizon normalisation: leave at once for the closest neighbor.
pub struct DenominatorFree;

impl Controller for DenominatorFree {
    fn name(&self) -> &'static str {
        "denominator_free"
    }

    fn plan_active(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_active(ctx)
    }

    fn plan_idle(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_idle(ctx)
    }

    fn plan_departure(&mut self, ctx: &RhcpContext) -> Option<ControlDecision> {
        plan_denominator_free(ctx)
    }
}
