use crate::model::{NeighborhoodParams, TwoHopParams};

use super::quadform::{segment, sum_of, Affine4, Quad4};

/// Uncertainty, growth rate and removal rate of one target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub r: f64,
    pub a: f64,
    pub b: f64,
}

/// Aggregate of unvisited targets: summed uncertainty and summed growth rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rest {
    pub r: f64,
    pub a: f64,
}

/// One-hop plan data: agent at `i`, candidate next target `j`, all other neighborhood
/// members aggregated in `rest`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneHop {
    pub i: Site,
    pub j: Site,
    pub rest: Rest,
    pub rho: f64,
    pub horizon: f64,
}

/// Two-hop plan data for the sequence `i -> j -> k`; `rest` aggregates the two-hop
/// neighborhood without `j` and `k` (it includes `i` unless `k = i`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHop {
    pub j: Site,
    pub k: Site,
    pub rest: Rest,
    pub rho_ij: f64,
    pub rho_jk: f64,
    pub horizon: f64,
}

/// Per-member weights of the one-hop objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneHopWeights {
    pub i: f64,
    pub j: f64,
    pub rest: f64,
}

impl OneHopWeights {
    pub const UNIT: Self = Self { i: 1.0, j: 1.0, rest: 1.0 };

    /// `α` on the next target, `1 − α` on every other neighborhood member.
    pub fn alpha(alpha: f64) -> Self {
        Self { i: 1.0 - alpha, j: alpha, rest: 1.0 - alpha }
    }
}

/// Per-member weights of the two-hop objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHopWeights {
    pub j: f64,
    pub k: f64,
    pub rest: f64,
}

impl TwoHopWeights {
    pub const UNIT: Self = Self { j: 1.0, k: 1.0, rest: 1.0 };

    pub fn alpha_beta(alpha: f64, beta: f64) -> Self {
        Self { j: alpha, k: beta, rest: 1.0 - alpha - beta }
    }
}

impl OneHop {
    pub fn params(&self) -> NeighborhoodParams {
        NeighborhoodParams::compose(self.rest.a, self.rest.r, (self.i.a, self.i.r), (self.j.a, self.j.r))
    }

    /// Active time that clears `j` when it is reached `lead` time units from now.
    pub fn u_j_bound(&self, lead: f64) -> f64 {
        (self.j.r + self.j.a * lead) / (self.j.b - self.j.a)
    }

    /// Active time that clears `i` from its current uncertainty.
    pub fn u_i_bound(&self) -> f64 {
        self.i.r / (self.i.b - self.i.a)
    }

    /// Weighted integral of the neighborhood uncertainty over the window induced by the plan
    /// `(u_i, v_i, u_j, v_j)`, as a quadratic in those variables.
    pub fn numerator(&self, w: OneHopWeights) -> Quad4 {
        let (i, j) = (self.i, self.j);
        let drop_i = Affine4::constant(i.r).plus(Affine4::var(0).scaled(-(i.b - i.a)));
        let ji = segment(&Affine4::constant(i.r), -(i.b - i.a), &Affine4::var(0)).plus(&segment(
            &drop_i,
            i.a,
            &sum_of(self.rho, &[2, 3]),
        ));
        let lead_j = sum_of(self.rho, &[0, 1]);
        let jj = segment(&Affine4::constant(j.r), j.a, &lead_j).plus(&segment(
            &Affine4::constant(j.r).plus(lead_j.scaled(j.a)),
            -(j.b - j.a),
            &Affine4::var(2),
        ));
        let jm = segment(&Affine4::constant(self.rest.r), self.rest.a, &sum_of(self.rho, &[0, 1, 2, 3]));
        ji.scaled(w.i).plus(&jj.scaled(w.j)).plus(&jm.scaled(w.rest))
    }
}

impl TwoHop {
    pub fn params(&self) -> TwoHopParams {
        TwoHopParams::compose(self.rest.a, self.rest.r, (self.j.a, self.j.r), (self.k.a, self.k.r))
    }

    pub fn span(&self) -> f64 {
        self.rho_ij + self.rho_jk
    }

    /// Weighted integral over the window induced by `(u_j, v_j, u_k, v_k)`.
    pub fn numerator(&self, w: TwoHopWeights) -> Quad4 {
        let (j, k) = (self.j, self.k);
        let s = self.span();
        let rj_arrive = j.r + j.a * self.rho_ij;
        let rj_leave = Affine4::constant(rj_arrive).plus(Affine4::var(0).scaled(-(j.b - j.a)));
        let jj = segment(&Affine4::constant(j.r), j.a, &Affine4::constant(self.rho_ij))
            .plus(&segment(&Affine4::constant(rj_arrive), -(j.b - j.a), &Affine4::var(0)))
            .plus(&segment(&rj_leave, j.a, &sum_of(self.rho_jk, &[2, 3])));
        let lead_k = sum_of(s, &[0, 1]);
        let jk = segment(&Affine4::constant(k.r), k.a, &lead_k).plus(&segment(
            &Affine4::constant(k.r).plus(lead_k.scaled(k.a)),
            -(k.b - k.a),
            &Affine4::var(2),
        ));
        let jm = segment(&Affine4::constant(self.rest.r), self.rest.a, &sum_of(s, &[0, 1, 2, 3]));
        jj.scaled(w.j).plus(&jk.scaled(w.k)).plus(&jm.scaled(w.rest))
    }
}

/// Numerator coefficients of the departure problem in `[u², v², uv, u, v, 1]` order for the
/// plan `(u_j, v_j)`; the denominator is `ρ + u + v`.
pub fn rhcp3_coeffs(p: &NeighborhoodParams, b_j: f64, rho: f64) -> [f64; 6] {
    [
        (p.abar - b_j) / 2.0,
        p.abar_j / 2.0,
        p.abar_j,
        p.rbar + p.abar * rho,
        p.rbar_j + p.abar_j * rho,
        rho / 2.0 * (2.0 * p.rbar + p.abar * rho),
    ]
}

/// Numerator coefficients of the idle problem in
/// `[v_i², u_j², v_j², v_i u_j, v_i v_j, u_j v_j, v_i, u_j, v_j, 1]` order.
pub fn rhcp2_coeffs(p: &NeighborhoodParams, b_j: f64, rho: f64) -> [f64; 10] {
    [
        p.abar_i / 2.0,
        (p.abar - b_j) / 2.0,
        p.abar_j / 2.0,
        p.abar_i,
        p.abar_ij,
        p.abar_j,
        p.rbar_i + p.abar_i * rho,
        p.rbar + p.abar * rho,
        p.rbar_ij + p.abar_j * rho,
        rho / 2.0 * (2.0 * p.rbar_i + p.abar * rho),
    ]
}

/// Numerator coefficients of the active problem in the 15-entry order
/// `[u_i², v_i², u_j², v_j², u_i v_i, u_i u_j, u_i v_j, v_i u_j, v_i v_j, u_j v_j, u_i, v_i, u_j, v_j, 1]`.
pub fn rhcp1_coeffs(p: &NeighborhoodParams, b_i: f64, b_j: f64, rho: f64) -> [f64; 15] {
    [
        (p.abar - b_i) / 2.0,
        p.abar_i / 2.0,
        (p.abar - b_j) / 2.0,
        p.abar_j / 2.0,
        p.abar_i,
        p.abar - b_i,
        p.abar_j - b_i,
        p.abar_i,
        p.abar_ij,
        p.abar_j,
        p.rbar + (p.abar - b_i) * rho,
        p.rbar_i + p.abar_i * rho,
        p.rbar + p.abar * rho,
        p.rbar_j + p.abar_j * rho,
        rho / 2.0 * (2.0 * p.rbar + p.abar * rho),
    ]
}

/// Numerator coefficients of the two-hop departure problem over `(u_j, v_j, u_k, v_k)` in
/// the same 15-entry order; the denominator is `ρ_ij + ρ_jk + u_j + v_j + u_k + v_k`.
pub fn extended_coeffs(t: &TwoHopParams, b_j: f64, b_k: f64, rho_ij: f64, rho_jk: f64) -> [f64; 15] {
    let s = rho_ij + rho_jk;
    [
        (t.atil - b_j) / 2.0,
        t.atil_j / 2.0,
        (t.atil - b_k) / 2.0,
        t.atil_k / 2.0,
        t.atil_j,
        t.atil - b_j,
        t.atil_k - b_j,
        t.atil_j,
        t.atil_jk,
        t.atil_k,
        t.rtil - b_j * rho_jk + t.atil * s,
        t.rtil_j + t.atil_j * s,
        t.rtil + t.atil * s,
        t.rtil_k + t.atil_k * s,
        s / 2.0 * (2.0 * t.rtil + t.atil * s),
    ]
}

/// Places a departure-problem table into the one-hop variable order.
pub fn embed_rhcp3(c: &[f64; 6]) -> Quad4 {
    let mut t = [0.0; 15];
    for (slot, &v) in [2, 3, 9, 12, 13, 14].iter().zip(c) {
        t[*slot] = v;
    }
    Quad4::from_table(&t)
}

/// Places an idle-problem table into the one-hop variable order.
pub fn embed_rhcp2(c: &[f64; 10]) -> Quad4 {
    let mut t = [0.0; 15];
    for (slot, &v) in [1, 2, 3, 7, 8, 9, 11, 12, 13, 14].iter().zip(c) {
        t[*slot] = v;
    }
    Quad4::from_table(&t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{local_objective, Member, PlannedVisit};
    use proptest::prelude::*;

    fn site() -> impl Strategy<Value = Site> {
        (0.0f64..5.0, 0.0f64..2.0, 2.5f64..12.0).prop_map(|(r, a, b)| Site { r, a, b })
    }

    fn rest() -> impl Strategy<Value = Rest> {
        (0.0f64..10.0, 0.0f64..4.0).prop_map(|(r, a)| Rest { r, a })
    }

    /// Direct trajectory integration of a one-hop plan; `rest` is one pure-growth member.
    fn one_hop_oracle(x: &OneHop, w: OneHopWeights, v: [f64; 4]) -> f64 {
        let [u_i, v_i, u_j, v_j] = v;
        let win = x.rho + v.iter().sum::<f64>();
        let members = [
            Member { target: 0, r: x.i.r, a: x.i.a, b: x.i.b, weight: w.i },
            Member { target: 1, r: x.j.r, a: x.j.a, b: x.j.b, weight: w.j },
            Member { target: 2, r: x.rest.r, a: x.rest.a, b: 1.0 + x.rest.a, weight: w.rest },
        ];
        let visits = [
            PlannedVisit { target: 0, arrive: 0.0, dwell: u_i + v_i },
            PlannedVisit { target: 1, arrive: u_i + v_i + x.rho, dwell: u_j + v_j },
        ];
        local_objective(&members, &visits, win).unwrap()
    }

    #[test]
    fn departure_table_example() {
        // Path i - j, A = 1 everywhere, B_j = 10, ρ = 2, R_i = R_j = 0.5.
        let p = NeighborhoodParams::compose(0.0, 0.0, (1.0, 0.5), (1.0, 0.5));
        let c = rhcp3_coeffs(&p, 10.0, 2.0);
        assert_eq!(p.abar, 2.0);
        assert_eq!(c[0], -4.0);
        assert_eq!(c[5], 6.0);
    }

    #[test]
    fn departure_table_without_growth() {
        let p = NeighborhoodParams::compose(0.0, 0.0, (0.0, 0.0), (0.0, 0.0));
        assert_eq!(rhcp3_coeffs(&p, 10.0, 2.0), [-5.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn tables_match_builder(i in site(), j in site(), rest in rest(), rho in 0.1f64..5.0) {
            let x = OneHop { i, j, rest, rho, horizon: 100.0 };
            let p = x.params();
            let built = x.numerator(OneHopWeights::UNIT).table();
            let t1 = rhcp1_coeffs(&p, i.b, j.b, rho);
            // Idle and departure problems start with R_i = 0.
            let idle = OneHop { i: Site { r: 0.0, ..i }, ..x };
            let built0 = idle.numerator(OneHopWeights::UNIT);
            let t2 = embed_rhcp2(&rhcp2_coeffs(&idle.params(), j.b, rho)).table();
            let t3 = embed_rhcp3(&rhcp3_coeffs(&idle.params(), j.b, rho)).table();
            for k in 0..15 {
                let tol = 1e-9 * built[k].abs().max(1.0);
                prop_assert!((built[k] - t1[k]).abs() <= tol, "active entry {}: {} vs {}", k, built[k], t1[k]);
                // Idle problem: entries not involving u_i.
                if ![0, 4, 5, 6, 10].contains(&k) {
                    prop_assert!((built0.table()[k] - t2[k]).abs() <= tol, "idle entry {}", k);
                }
                // Departure problem: entries involving only u_j, v_j.
                if [2, 3, 9, 12, 13, 14].contains(&k) {
                    prop_assert!((built0.table()[k] - t3[k]).abs() <= tol, "departure entry {}", k);
                }
            }
        }

        #[test]
        fn builder_matches_trajectory_integral(
            i in site(), j in site(), rest in rest(), rho in 0.1f64..5.0,
            fr in proptest::array::uniform4(0.0f64..1.0),
            wts in proptest::array::uniform3(0.0f64..1.0),
        ) {
            let x = OneHop { i, j, rest, rho, horizon: 100.0 };
            let w = OneHopWeights { i: wts[0], j: wts[1], rest: wts[2] };
            // Feasible plan: idle only after clearing, so u_i = u_i^B when v_i > 0.
            let u_i = x.u_i_bound();
            let v_i = 3.0 * fr[1];
            let u_j_max = x.u_j_bound(u_i + v_i + rho);
            let u_j = u_j_max * fr[2];
            let plan = [u_i, v_i, u_j, 0.0];
            let direct = one_hop_oracle(&x, w, plan);
            let poly = x.numerator(w).eval(&plan);
            prop_assert!((direct - poly).abs() <= 1e-9 * direct.abs().max(1.0));
            let u_i = u_i * fr[0];
            let plan = [u_i, 0.0, x.u_j_bound(u_i + rho), 2.0 * fr[3]];
            let direct = one_hop_oracle(&x, w, plan);
            let poly = x.numerator(w).eval(&plan);
            prop_assert!((direct - poly).abs() <= 1e-9 * direct.abs().max(1.0));
        }

        #[test]
        fn extended_table_matches_builder(j in site(), k in site(), rest in rest(),
            rho_ij in 0.1f64..5.0, rho_jk in 0.1f64..5.0) {
            let x = TwoHop { j, k, rest, rho_ij, rho_jk, horizon: 100.0 };
            let built = x.numerator(TwoHopWeights::UNIT).table();
            let t = extended_coeffs(&x.params(), j.b, k.b, rho_ij, rho_jk);
            for n in 0..15 {
                prop_assert!((built[n] - t[n]).abs() <= 1e-9 * built[n].abs().max(1.0), "entry {}: {} vs {}", n, built[n], t[n]);
            }
        }

        #[test]
        fn extended_builder_matches_trajectory_integral(
            j in site(), k in site(), rest in rest(),
            rho_ij in 0.1f64..5.0, rho_jk in 0.1f64..5.0,
            fr in proptest::array::uniform3(0.0f64..1.0),
        ) {
            let x = TwoHop { j, k, rest, rho_ij, rho_jk, horizon: 100.0 };
            let u_j = (j.r + j.a * rho_ij) / (j.b - j.a);
            let v_j = 2.0 * fr[0];
            let lead_k = rho_ij + u_j + v_j + rho_jk;
            let u_k = (k.r + k.a * lead_k) / (k.b - k.a) * fr[1];
            let plan = [u_j, v_j, u_k, 0.0];
            let win = rho_ij + rho_jk + plan.iter().sum::<f64>();
            let members = [
                Member::new(1, j.r, j.a, j.b),
                Member::new(2, k.r, k.a, k.b),
                Member::new(3, rest.r, rest.a, rest.a + 1.0),
            ];
            let visits = [
                PlannedVisit { target: 1, arrive: rho_ij, dwell: u_j + v_j },
                PlannedVisit { target: 2, arrive: rho_ij + u_j + v_j + rho_jk, dwell: u_k },
            ];
            let direct = local_objective(&members, &visits, win).unwrap();
            let poly = x.numerator(TwoHopWeights::UNIT).eval(&plan);
            prop_assert!((direct - poly).abs() <= 1e-9 * direct.abs().max(1.0));
        }
    }
}
