use thiserror::Error;

use super::graph::TargetGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeighborhoodError {
    #[error("target {j} is not a neighbor of {i}")]
    NotNeighbor { i: usize, j: usize },
}

/// Sums of growth rates and uncertainties over subsets of the closed neighborhood of `i`
/// when planning a move to `j`. The `_ij` sums run over `N_i \ {j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodParams {
    pub abar_ij: f64,
    pub rbar_ij: f64,
    pub abar_i: f64,
    pub abar_j: f64,
    pub abar: f64,
    pub rbar_i: f64,
    pub rbar_j: f64,
    pub rbar: f64,
}

/// Two-hop analogue for a planned sequence `i -> j -> k`. The `_jk` sums run over the two-hop
/// neighborhood of `i` without `j` and `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHopParams {
    pub atil_jk: f64,
    pub rtil_jk: f64,
    pub atil_j: f64,
    pub atil_k: f64,
    pub atil: f64,
    pub rtil_j: f64,
    pub rtil_k: f64,
    pub rtil: f64,
}

impl NeighborhoodParams {
    /// Builds the derived sums from the residual sums and `(A, R)` of `i` and `j`.
    pub fn compose(abar_ij: f64, rbar_ij: f64, (ai, ri): (f64, f64), (aj, rj): (f64, f64)) -> Self {
        Self {
            abar_ij,
            rbar_ij,
            abar_i: abar_ij + aj,
            abar_j: abar_ij + ai,
            abar: abar_ij + ai + aj,
            rbar_i: rbar_ij + rj,
            rbar_j: rbar_ij + ri,
            rbar: rbar_ij + ri + rj,
        }
    }
}

impl TwoHopParams {
    /// Builds the derived sums from the residual sums and `(A, R)` of `j` and `k`.
    pub fn compose(atil_jk: f64, rtil_jk: f64, (aj, rj): (f64, f64), (ak, rk): (f64, f64)) -> Self {
        Self {
            atil_jk,
            rtil_jk,
            atil_j: atil_jk + ak,
            atil_k: atil_jk + aj,
            atil: atil_jk + aj + ak,
            rtil_j: rtil_jk + rk,
            rtil_k: rtil_jk + rj,
            rtil: rtil_jk + rj + rk,
        }
    }
}

/// One-hop parameters from the uncertainty snapshot `r` (indexed by target).
pub fn neighborhood_params(
    graph: &TargetGraph,
    r: &[f64],
    i: usize,
    j: usize,
) -> Result<NeighborhoodParams, NeighborhoodError> {
    if !graph.is_neighbor(i, j) {
        return Err(NeighborhoodError::NotNeighbor { i, j });
    }
    let (mut abar_ij, mut rbar_ij) = (0.0, 0.0);
    for &m in graph.neighbors(i) {
        if m != j {
            abar_ij += graph.target(m).a;
            rbar_ij += r[m];
        }
    }
    Ok(NeighborhoodParams::compose(abar_ij, rbar_ij, (graph.target(i).a, r[i]), (graph.target(j).a, r[j])))
}

/// Two-hop parameters for the sequence `i -> j -> k` with `j ∈ N_i`, `k ∈ N_j`.
pub fn two_hop_params(
    graph: &TargetGraph,
    r: &[f64],
    i: usize,
    j: usize,
    k: usize,
) -> Result<TwoHopParams, NeighborhoodError> {
    if !graph.is_neighbor(i, j) {
        return Err(NeighborhoodError::NotNeighbor { i, j });
    }
    if !graph.is_neighbor(j, k) {
        return Err(NeighborhoodError::NotNeighbor { i: j, j: k });
    }
    let (mut atil_jk, mut rtil_jk) = (0.0, 0.0);
    for m in graph.two_hop_neighborhood(i) {
        if m != j && m != k {
            atil_jk += graph.target(m).a;
            rtil_jk += r[m];
        }
    }
    Ok(TwoHopParams::compose(atil_jk, rtil_jk, (graph.target(j).a, r[j]), (graph.target(k).a, r[k])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::graph::{Edge, Target};
    use proptest::prelude::*;

    fn graph(m: usize, pairs: &[(usize, usize)], a: &[f64]) -> TargetGraph {
        let targets = (0..m).map(|k| Target { id: k as u32, position: [0.0; 2], a: a[k], b: 10.0, r0: 0.5 }).collect();
        let mut edges = Vec::new();
        for &(x, y) in pairs {
            edges.push(Edge { from: x, to: y, rho: 1.0, length: 50.0, speed: 50.0 });
            edges.push(Edge { from: y, to: x, rho: 1.0, length: 50.0, speed: 50.0 });
        }
        TargetGraph::new(targets, edges).unwrap()
    }

    #[test]
    fn star_center() {
        let g = graph(3, &[(0, 1), (0, 2)], &[1.0; 3]);
        let p = neighborhood_params(&g, &[0.5; 3], 0, 1).unwrap();
        assert_eq!(p.abar_ij, 1.0);
        assert_eq!(p.abar, 3.0);
    }

    #[test]
    fn singleton_neighborhood_has_empty_residual() {
        let g = graph(2, &[(0, 1)], &[1.0; 2]);
        let p = neighborhood_params(&g, &[0.5, 2.0], 0, 1).unwrap();
        assert_eq!(p.abar_ij, 0.0);
        assert_eq!(p.rbar_ij, 0.0);
        assert_eq!(p.rbar, 2.5);
        assert_eq!(p.rbar_j, 0.5);
    }

    #[test]
    fn not_a_neighbor() {
        let g = graph(3, &[(0, 1), (1, 2)], &[1.0; 3]);
        assert!(neighborhood_params(&g, &[0.5; 3], 0, 2).is_err());
    }

    #[test]
    fn two_hop_path() {
        // Path 0 - 1 - 2 - 3 viewed from 0 towards 1 then 2: residual set is {0}.
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)], &[1.0, 2.0, 3.0, 4.0]);
        let r = [0.1, 0.2, 0.3, 0.4];
        let p = two_hop_params(&g, &r, 0, 1, 2).unwrap();
        assert_eq!(p.atil_jk, 1.0);
        assert_eq!(p.rtil_jk, 0.1);
        assert_eq!(p.atil, 6.0);
        assert_eq!(p.atil_j, 1.0 + 3.0);
        assert_eq!(p.rtil_k, 0.1 + 0.2);
        // Target 3 lies outside the two-hop set of 0.
        assert!(g.two_hop_neighborhood(0).iter().all(|&m| m != 3));
    }

    proptest! {
        #[test]
        fn linear_identities(
            a in proptest::collection::vec(0.0f64..3.0, 5),
            r in proptest::collection::vec(0.0f64..10.0, 5),
            j in 1usize..5,
        ) {
            let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)], &a);
            let p = neighborhood_params(&g, &r, 0, j).unwrap();
            prop_assert!((p.abar - (p.abar_ij + a[0] + a[j])).abs() <= 1e-12);
            prop_assert!((p.rbar - (p.rbar_ij + r[0] + r[j])).abs() <= 1e-12);
            let direct: f64 = g.closed_neighborhood(0).iter().map(|&m| a[m]).sum();
            prop_assert!((p.abar - direct).abs() <= 1e-12);
        }
    }
}
