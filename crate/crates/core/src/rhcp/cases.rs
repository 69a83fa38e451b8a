use crate::rfop::PolytopeBounds;

use super::context::RhcpError;
use super::instance::{embed_rhcp2, rhcp1_coeffs, rhcp2_coeffs, OneHop, TwoHop, TwoHopWeights};
use super::quadform::{solve_cases, Affine2, CaseMap, Quad4};
use super::rhcp3::OneHopPlan;

const INF: f64 = f64::INFINITY;

fn check(x: &OneHop) -> Result<(), RhcpError> {
    if !(x.horizon > 0.0) {
        return Err(RhcpError::Horizon(x.horizon));
    }
    if x.rho > x.horizon {
        return Err(RhcpError::Infeasible);
    }
    for s in [x.i, x.j] {
        if !(s.b > s.a) {
            return Err(RhcpError::RateOrdering { a: s.a, b: s.b });
        }
    }
    Ok(())
}

fn affine(c: f64, x: f64, y: f64) -> Affine2 {
    Affine2 { c, x, y }
}

fn one_hop_plan(x: &OneHop, numerator: &Quad4, cases: &[CaseMap]) -> Result<OneHopPlan, RhcpError> {
    let s = solve_cases(numerator, x.rho, cases).ok_or(RhcpError::Infeasible)?;
    let [u_i, v_i, u_j, v_j] = s.vars;
    Ok(OneHopPlan { u_i, v_i, u_j, v_j, cost: s.cost })
}

/// Slope `A/(B − A)`, intercept `(R + A·lead)/(B − A)` and `B/(B − A)` of a clearing time.
fn clearing(r: f64, a: f64, b: f64, lead: f64) -> (f64, f64, f64) {
    (a / (b - a), (r + a * lead) / (b - a), b / (b - a))
}

/// The two constraint-pair cases of the idle problem over `(u_i, v_i, u_j, v_j)`.
pub fn rhcp2_cases(x: &OneHop) -> Vec<CaseMap> {
    let (p, l, q) = clearing(x.j.r, x.j.a, x.j.b, x.rho);
    let zero = Affine2::ZERO;
    vec![
        CaseMap {
            vars: [zero, Affine2::X, Affine2::Y, zero],
            bounds: PolytopeBounds { p, l, q: 1.0, m: x.horizon - x.rho, n: INF },
        },
        CaseMap {
            vars: [zero, Affine2::X, affine(l, p, 0.0), Affine2::Y],
            bounds: PolytopeBounds { p: 0.0, l: INF, q, m: x.horizon - x.rho - l, n: INF },
        },
    ]
}

/// Idle problem: the agent sits at a cleared `i` and plans idle time there, then `j`.
pub fn solve_rhcp2(x: &OneHop) -> Result<OneHopPlan, RhcpError> {
    check(x)?;
    if x.i.r > 0.0 {
        return Err(RhcpError::NotIdle(x.i.r));
    }
    let numerator = embed_rhcp2(&rhcp2_coeffs(&x.params(), x.j.b, x.rho));
    one_hop_plan(x, &numerator, &rhcp2_cases(x))
}

/// The four constraint-pair cases of the active problem over `(u_i, v_i, u_j, v_j)`.
pub fn rhcp1_cases(x: &OneHop) -> Vec<CaseMap> {
    let u_ib = x.u_i_bound();
    let (p, l, q) = clearing(x.j.r, x.j.a, x.j.b, x.rho);
    let zero = Affine2::ZERO;
    let slack = x.horizon - x.rho;
    vec![
        CaseMap {
            vars: [Affine2::X, zero, Affine2::Y, zero],
            bounds: PolytopeBounds { p, l, q: 1.0, m: slack, n: u_ib },
        },
        CaseMap {
            vars: [Affine2::X, zero, affine(l, p, 0.0), Affine2::Y],
            bounds: PolytopeBounds { p: 0.0, l: INF, q, m: slack - l, n: u_ib },
        },
        CaseMap {
            vars: [Affine2::constant(u_ib), Affine2::X, Affine2::Y, zero],
            bounds: PolytopeBounds { p, l: l + p * u_ib, q: 1.0, m: slack - u_ib, n: INF },
        },
        CaseMap {
            vars: [Affine2::constant(u_ib), Affine2::X, affine(l + p * u_ib, p, 0.0), Affine2::Y],
            bounds: PolytopeBounds { p: 0.0, l: INF, q, m: slack - l - q * u_ib, n: INF },
        },
    ]
}

/// Active problem: the agent is clearing `i` and plans its remaining active and idle time
/// there, then `j`.
pub fn solve_rhcp1(x: &OneHop) -> Result<OneHopPlan, RhcpError> {
    check(x)?;
    let numerator = Quad4::from_table(&rhcp1_coeffs(&x.params(), x.i.b, x.j.b, x.rho));
    one_hop_plan(x, &numerator, &rhcp1_cases(x))
}

/// Optimal two-hop plan `(u_j, v_j, u_k, v_k)` and its cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHopPlan {
    pub u_j: f64,
    pub v_j: f64,
    pub u_k: f64,
    pub v_k: f64,
    pub cost: f64,
}

impl TwoHopPlan {
    pub fn vars(&self) -> [f64; 4] {
        [self.u_j, self.v_j, self.u_k, self.v_k]
    }
}

/// The four constraint-pair cases of the two-hop problem over `(u_j, v_j, u_k, v_k)`.
pub fn extended_cases(x: &TwoHop) -> Vec<CaseMap> {
    let s = x.span();
    let u_jb = (x.j.r + x.j.a * x.rho_ij) / (x.j.b - x.j.a);
    let (p, l, q) = clearing(x.k.r, x.k.a, x.k.b, s);
    let zero = Affine2::ZERO;
    let slack = x.horizon - s;
    vec![
        CaseMap {
            vars: [Affine2::X, zero, Affine2::Y, zero],
            bounds: PolytopeBounds { p, l, q: 1.0, m: slack, n: u_jb },
        },
        CaseMap {
            vars: [Affine2::X, zero, affine(l, p, 0.0), Affine2::Y],
            bounds: PolytopeBounds { p: 0.0, l: INF, q, m: slack - l, n: u_jb },
        },
        CaseMap {
            vars: [Affine2::constant(u_jb), Affine2::X, Affine2::Y, zero],
            bounds: PolytopeBounds { p, l: l + p * u_jb, q: 1.0, m: slack - u_jb, n: INF },
        },
        CaseMap {
            vars: [Affine2::constant(u_jb), Affine2::X, affine(l + p * u_jb, p, 0.0), Affine2::Y],
            bounds: PolytopeBounds { p: 0.0, l: INF, q, m: slack - l - q * u_jb, n: INF },
        },
    ]
}

/// Two-hop departure problem with per-member weights.
pub fn solve_extended(x: &TwoHop, w: TwoHopWeights) -> Result<TwoHopPlan, RhcpError> {
    if !(x.horizon > 0.0) {
        return Err(RhcpError::Horizon(x.horizon));
    }
    if x.span() > x.horizon {
        return Err(RhcpError::Infeasible);
    }
    for s in [x.j, x.k] {
        if !(s.b > s.a) {
            return Err(RhcpError::RateOrdering { a: s.a, b: s.b });
        }
    }
    for v in [w.j, w.k, w.rest] {
        if !(0.0..=1.0).contains(&v) {
            return Err(RhcpError::Weight(v));
        }
    }
    let s = solve_cases(&x.numerator(w), x.span(), &extended_cases(x)).ok_or(RhcpError::Infeasible)?;
    let [u_j, v_j, u_k, v_k] = s.vars;
    Ok(TwoHopPlan { u_j, v_j, u_k, v_k, cost: s.cost })
}

/// Cost ranking used by the `α = β = 0` shortcut.
pub fn two_hop_shortcut_score(x: &TwoHop) -> f64 {
    let t = x.params();
    let s = x.span();
    (2.0 * t.rtil + t.atil * s) - (2.0 * x.j.r + x.j.a * s) - (2.0 * x.k.r + x.k.a * s)
}
