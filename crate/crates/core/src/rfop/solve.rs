use super::conic::{stationary_points, Stationary};
use super::objective::{PolytopeBounds, RationalObjective, RfopError, RfopSolution};
use super::segment::{minimize_segment, restrict_along_x, restrict_along_y};

/// Stand-in for an absent bound in a direction the objective keeps decreasing.
pub const LARGE_BOX: f64 = 1e9;
/// Relative tolerance for treating two pool values as equal.
const TIE_TOL: f64 = 1e-9;
/// Absolute slack when testing stationary points for feasibility.
const FEAS_TOL: f64 = 1e-12;

struct Pool {
    best: Option<(f64, f64, f64)>,
}

impl Pool {
    fn offer(&mut self, x: f64, y: f64, v: f64) {
        if !v.is_finite() {
            return;
        }
        self.best = match self.best {
            None => Some((x, y, v)),
            Some((bx, by, bv)) => {
                let tol = TIE_TOL * bv.abs().max(v.abs()).max(1.0);
                if v < bv - tol || (v <= bv + tol && (x, y) < (bx, by)) {
                    Some((x, y, v))
                } else {
                    Some((bx, by, bv))
                }
            }
        };
    }
}

/// Global minimum of `H` over the polytope defined by `bounds`.
///
/// The pool holds every feasible stationary point and the minimum along each boundary
/// segment; the least value wins, ties going to the lexicographically smallest `(x, y)`.
pub fn solve_rfop(h: &RationalObjective, bounds: &PolytopeBounds) -> Result<RfopSolution, RfopError> {
    RationalObjective::new(h.c)?;
    bounds.validate()?;
    let PolytopeBounds { p, q, l, m, n } = *bounds;
    let mut clipped = false;

    let mut x_max = n;
    if q > 0.0 && m.is_finite() {
        x_max = x_max.min(m / q);
    }
    if x_max.is_infinite() {
        x_max = LARGE_BOX;
        clipped = true;
    }
    let (l, m) = if l.is_infinite() && m.is_infinite() {
        clipped = true;
        (LARGE_BOX, f64::INFINITY)
    } else {
        (l, m)
    };
    let upper = |x: f64| (p * x + l).min(-q * x + m).max(0.0);
    let effective = PolytopeBounds { p, q, l, m, n: x_max };

    let mut pool = Pool { best: None };
    let segment = |anchor: (f64, f64), along_x: bool, slope: f64, len: f64, pool: &mut Pool| {
        if !(len >= 0.0) {
            return;
        }
        let s = if along_x { restrict_along_x(h, anchor, slope) } else { restrict_along_y(h, anchor, slope) };
        if let Ok((r, _)) = minimize_segment(&s, 0.0, len) {
            let (x, y) =
                if along_x { (anchor.0 + r, anchor.1 + slope * r) } else { (anchor.0 + slope * r, anchor.1 + r) };
            let (x, y) = (x.clamp(0.0, x_max), y.clamp(0.0, upper(x.clamp(0.0, x_max))));
            pool.offer(x, y, h.eval(x, y));
        }
    };

    // Bottom edge and left edge.
    segment((0.0, 0.0), true, 0.0, x_max, &mut pool);
    segment((0.0, 0.0), false, 0.0, l.min(m), &mut pool);

    // Upper boundary: the rising line up to its intersection with the falling line.
    let x_int = if l < m {
        if p + q > 0.0 {
            (m - l) / (p + q)
        } else {
            f64::INFINITY
        }
    } else {
        0.0
    };
    if l < m {
        segment((0.0, l), true, p, x_int.min(x_max), &mut pool);
    }
    if m.is_finite() && x_int <= x_max {
        let x0 = x_int.max(0.0);
        segment((x0, (-q * x0 + m).max(0.0)), true, -q, x_max - x0, &mut pool);
    }
    // Right edge.
    segment((x_max, 0.0), false, 0.0, upper(x_max), &mut pool);

    if let Ok(Stationary::Points(pts)) = stationary_points(h) {
        for (x, y) in pts {
            if effective.contains(x, y, FEAS_TOL * x.abs().max(y.abs()).max(1.0)) {
                let xc = x.clamp(0.0, x_max);
                let yc = y.clamp(0.0, upper(xc));
                pool.offer(xc, yc, h.eval(xc, yc));
            }
        }
    }

    let (x, y, value) = pool.best.ok_or(RfopError::Infeasible)?;
    Ok(RfopSolution { x, y, value, clipped })
}
