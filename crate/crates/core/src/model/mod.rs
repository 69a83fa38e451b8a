//! Targets, uncertainty dynamics and objective accounting.

mod dynamics;
mod graph;
mod neighborhood;
mod objective;

pub use dynamics::{
    evolve_target, integrate, rate, segment_cost, visit_cost, DynamicsError, Evolution, TargetState, CROSSING_SNAP,
};
pub use graph::{Edge, GraphError, Target, TargetGraph, TransitTable};
pub use neighborhood::{neighborhood_params, two_hop_params, NeighborhoodError, NeighborhoodParams, TwoHopParams};
pub use objective::{local_objective, Member, ObjectiveError, PlannedVisit};
