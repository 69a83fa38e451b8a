use crate::rfop::PolytopeBounds;

use super::context::RhcpError;
use super::instance::{embed_rhcp3, rhcp3_coeffs, OneHop, OneHopWeights};
use super::quadform::{solve_cases, Affine2, CaseMap, Quad4};

/// Optimal one-hop plan `(u_i, v_i, u_j, v_j)` and its cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneHopPlan {
    pub u_i: f64,
    pub v_i: f64,
    pub u_j: f64,
    pub v_j: f64,
    pub cost: f64,
}

impl OneHopPlan {
    pub fn vars(&self) -> [f64; 4] {
        [self.u_i, self.v_i, self.u_j, self.v_j]
    }
}

/// Departure-problem cost of the plan `(u, v)` at `j`.
pub fn rhcp3_cost(x: &OneHop, u: f64, v: f64) -> f64 {
    let c = rhcp3_coeffs(&x.params(), x.j.b, x.rho);
    (c[0] * u * u + c[1] * v * v + c[2] * u * v + c[3] * u + c[4] * v + c[5]) / (x.rho + u + v)
}

/// Break-even active time at which staying at `j` costs as much as leaving at once.
pub fn u_sharp(x: &OneHop) -> f64 {
    let abar = x.params().abar;
    abar * x.rho / (x.j.b - abar)
}

/// Idle time minimizing the departure cost once `j` has been cleared; infinite when no
/// neighborhood member other than `j` grows.
pub fn v_sharp(x: &OneHop) -> f64 {
    let p = x.params();
    let lead = x.rho + x.u_j_bound(x.rho);
    if p.abar_j <= 0.0 {
        return f64::INFINITY;
    }
    let inner = ((x.j.b - x.j.a) * lead * lead - x.j.b * x.rho * x.rho) / p.abar_j;
    inner.max(0.0).sqrt() - lead
}

struct Limits {
    u_b: f64,
    u_bar: f64,
    v_bar: f64,
}

fn limits(x: &OneHop) -> Result<Limits, RhcpError> {
    if !(x.horizon > 0.0) {
        return Err(RhcpError::Horizon(x.horizon));
    }
    if x.rho > x.horizon {
        return Err(RhcpError::Infeasible);
    }
    if !(x.j.b > x.j.a) {
        return Err(RhcpError::RateOrdering { a: x.j.a, b: x.j.b });
    }
    let u_b = x.u_j_bound(x.rho);
    let slack = x.horizon - x.rho;
    Ok(Limits { u_b, u_bar: u_b.min(slack), v_bar: slack - u_b })
}

fn plan(x: &OneHop, u: f64, v: f64) -> OneHopPlan {
    OneHopPlan { u_i: 0.0, v_i: 0.0, u_j: u, v_j: v, cost: rhcp3_cost(x, u, v) }
}

/// Closed-form departure decision: the better of the active-only and the clear-then-idle
/// solutions, the active-only one on ties.
pub fn solve_rhcp3(x: &OneHop) -> Result<OneHopPlan, RhcpError> {
    let Limits { u_b, u_bar, v_bar } = limits(x)?;
    let abar = x.params().abar;
    let b_j = x.j.b;

    let u1 = if abar < b_j && u_bar > u_sharp(x) { u_bar } else { 0.0 };
    let first = plan(x, u1, 0.0);
    if v_bar < 0.0 {
        return Ok(first);
    }
    let ratio = x.rho / (x.rho + u_b);
    let v2 = if abar >= b_j * (1.0 - ratio * ratio) { 0.0 } else { v_sharp(x).min(v_bar) };
    let second = plan(x, u_b, v2);
    let tol = 1e-12 * first.cost.abs().max(1.0);
    Ok(if second.cost < first.cost - tol { second } else { first })
}

/// The five-branch combined table exactly as printed; kept for comparison with
/// [`solve_rhcp3`], which it can lose to when idling after clearing `j` pays off.
pub fn branch_table(x: &OneHop) -> Result<OneHopPlan, RhcpError> {
    let Limits { u_b, u_bar, v_bar } = limits(x)?;
    let abar = x.params().abar;
    let b_j = x.j.b;
    let ratio = x.rho / (x.rho + u_b);
    let (u, v) = if u_sharp(x) > u_bar || abar >= b_j {
        (0.0, 0.0)
    } else if u_bar < u_b {
        (u_bar, 0.0)
    } else if abar >= b_j * (1.0 - ratio * ratio) {
        (u_b, 0.0)
    } else if v_sharp(x) <= v_bar {
        (u_b, v_sharp(x))
    } else {
        (u_b, v_bar)
    };
    Ok(plan(x, u, v))
}

/// The two structural cases over `(u_i, v_i, u_j, v_j)`: active-only at `j`, then clear
/// `j` and idle.
fn departure_cases(l: &Limits) -> Vec<CaseMap> {
    let strip = |n: f64| PolytopeBounds { p: 0.0, q: 0.0, l: 0.0, m: f64::INFINITY, n };
    let zero = Affine2::ZERO;
    let mut cases = vec![CaseMap { vars: [zero, zero, Affine2::X, zero], bounds: strip(l.u_bar) }];
    if l.v_bar >= 0.0 {
        cases.push(CaseMap { vars: [zero, zero, Affine2::constant(l.u_b), Affine2::X], bounds: strip(l.v_bar) });
    }
    cases
}

fn solve_departure(x: &OneHop, numerator: &Quad4) -> Result<OneHopPlan, RhcpError> {
    let l = limits(x)?;
    let sol = solve_cases(numerator, x.rho, &departure_cases(&l)).ok_or(RhcpError::Infeasible)?;
    Ok(OneHopPlan { u_i: 0.0, v_i: 0.0, u_j: sol.vars[2], v_j: sol.vars[3], cost: sol.cost })
}

/// Departure decision through the general rational solver on the coefficient table.
pub fn solve_rhcp3_rfop(x: &OneHop) -> Result<OneHopPlan, RhcpError> {
    solve_departure(x, &embed_rhcp3(&rhcp3_coeffs(&x.params(), x.j.b, x.rho)))
}

/// Departure decision with `α` on the next target and `1 − α` on every other member.
pub fn solve_rhcp3_weighted(x: &OneHop, alpha: f64) -> Result<OneHopPlan, RhcpError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(RhcpError::Weight(alpha));
    }
    solve_departure(x, &x.numerator(OneHopWeights::alpha(alpha)))
}

/// Cost ranking used by the `α = 0` shortcut: `(2R̄ + Āρ) − (2R_j + A_jρ)`.
pub fn shortcut_score(x: &OneHop) -> f64 {
    let p = x.params();
    (2.0 * p.rbar + p.abar * x.rho) - (2.0 * x.j.r + x.j.a * x.rho)
}

/// Plan of the `α = 0` shortcut: leave at once, cost `R̄_j + Ā_j ρ / 2`.
pub fn shortcut_plan(x: &OneHop) -> OneHopPlan {
    let p = x.params();
    OneHopPlan { u_i: 0.0, v_i: 0.0, u_j: 0.0, v_j: 0.0, cost: p.rbar_j + 0.5 * p.abar_j * x.rho }
}

/// Plan of the controller that drops the horizon normalisation: always `(0, 0)` with the
/// transit-only integral as its cost.
pub fn denominator_free(x: &OneHop) -> OneHopPlan {
    let c = rhcp3_coeffs(&x.params(), x.j.b, x.rho);
    OneHopPlan { u_i: 0.0, v_i: 0.0, u_j: 0.0, v_j: 0.0, cost: c[5] }
}
