//! Receding-horizon planning problems solved at every local event.

mod cases;
mod context;
mod instance;
mod plan;
mod quadform;
mod rhcp3;

pub use cases::{
    extended_cases, rhcp1_cases, rhcp2_cases, solve_extended, solve_rhcp1, solve_rhcp2, two_hop_shortcut_score,
    TwoHopPlan,
};
pub use context::{
    active_time_bound, active_time_bound_affine, next_visit, ControlDecision, Lookahead, RhcpContext, RhcpError,
};
pub use instance::{
    embed_rhcp2, embed_rhcp3, extended_coeffs, rhcp1_coeffs, rhcp2_coeffs, rhcp3_coeffs, OneHop, OneHopWeights, Rest,
    Site, TwoHop, TwoHopWeights,
};
pub use plan::{
    plan_active, plan_denominator_free, plan_idle, plan_one_hop, plan_shortcut, plan_two_hop, plan_two_hop_shortcut,
};
pub use quadform::{segment, solve_cases, sum_of, Affine2, Affine4, CaseMap, CaseSolution, Quad4};
pub use rhcp3::{
    branch_table, denominator_free, rhcp3_cost, shortcut_plan, shortcut_score, solve_rhcp3, solve_rhcp3_rfop,
    solve_rhcp3_weighted, u_sharp, v_sharp, OneHopPlan,
};
