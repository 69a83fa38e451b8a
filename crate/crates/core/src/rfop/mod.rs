//! Global minimization of a bivariate rational function (quadratic over affine) on a
//! convex 2-polytope.

mod conic;
mod objective;
mod quartic;
mod segment;
mod solve;

pub use conic::{stationary_points, Stationary};
pub use objective::{PolytopeBounds, RationalObjective, RfopError, RfopSolution};
pub use quartic::{solve_poly, solve_quartic};
pub use segment::{
    delta_h, delta_h_at, minimize_segment, restrict_along_x, restrict_along_y, restrict_to_line, SegmentRestriction,
};
pub use solve::{solve_rfop, LARGE_BOX};
