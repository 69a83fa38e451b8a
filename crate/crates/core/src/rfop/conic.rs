use super::objective::{RationalObjective, RfopError};
use super::quartic::solve_poly;

/// Relative residual both conics must satisfy at a returned point.
const RESIDUAL_TOL: f64 = 1e-6;

/// Outcome of intersecting the two gradient conics.
#[derive(Debug, Clone, PartialEq)]
pub enum Stationary {
    Points(Vec<(f64, f64)>),
    /// The conics share a curve, so the stationary set is not a finite point set.
    Degenerate,
}

/// Conic `[x², xy, y², x, y, 1]`.
type Conic = [f64; 6];

fn eval(k: &Conic, x: f64, y: f64) -> f64 {
    k[0] * x * x + k[1] * x * y + k[2] * y * y + k[3] * x + k[4] * y + k[5]
}

fn magnitude(k: &Conic, x: f64, y: f64) -> f64 {
    (k[0] * x * x).abs()
        + (k[1] * x * y).abs()
        + (k[2] * y * y).abs()
        + (k[3] * x).abs()
        + (k[4] * y).abs()
        + k[5].abs()
}

fn swap(k: &Conic) -> Conic {
    [k[2], k[1], k[0], k[4], k[3], k[5]]
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (k, v) in a.iter().enumerate() {
        out[k] += v;
    }
    for (k, v) in b.iter().enumerate() {
        out[k] += v;
    }
    out
}

fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|v| -v).collect()
}

/// Writes the conic as `a y² + b(x) y + c(x)` with polynomial coefficients in `x`.
fn in_y(k: &Conic) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    (vec![k[2]], vec![k[4], k[1]], vec![k[5], k[3], k[0]])
}

/// Resultant of the two conics with respect to `y`, as a polynomial in `x`.
fn resultant_in_x(k1: &Conic, k2: &Conic) -> Vec<f64> {
    let (a1, b1, c1) = in_y(k1);
    let (a2, b2, c2) = in_y(k2);
    let deg1 = if k1[2] != 0.0 {
        2
    } else if k1[4] != 0.0 || k1[1] != 0.0 {
        1
    } else {
        0
    };
    let deg2 = if k2[2] != 0.0 {
        2
    } else if k2[4] != 0.0 || k2[1] != 0.0 {
        1
    } else {
        0
    };
    match (deg1, deg2) {
        (2, 2) => {
            let ac = add(&mul(&a1, &c2), &neg(&mul(&a2, &c1)));
            let ab = add(&mul(&a1, &b2), &neg(&mul(&a2, &b1)));
            let bc = add(&mul(&b1, &c2), &neg(&mul(&b2, &c1)));
            add(&mul(&ac, &ac), &neg(&mul(&ab, &bc)))
        }
        (2, 1) => quad_linear(&a1, &b1, &c1, &b2, &c2),
        (1, 2) => quad_linear(&a2, &b2, &c2, &b1, &c1),
        (1, 1) => add(&mul(&b1, &c2), &neg(&mul(&b2, &c1))),
        (0, _) => c1,
        (_, 0) => c2,
        _ => unreachable!(),
    }
}

fn quad_linear(a1: &[f64], b1: &[f64], c1: &[f64], b2: &[f64], c2: &[f64]) -> Vec<f64> {
    let t1 = mul(a1, &mul(c2, c2));
    let t2 = mul(b1, &mul(b2, c2));
    let t3 = mul(c1, &mul(b2, b2));
    add(&add(&t1, &neg(&t2)), &t3)
}

fn is_zero_poly(p: &[f64], scale: f64) -> bool {
    p.iter().all(|c| c.abs() <= 1e-13 * scale)
}

fn y_candidates(k: &Conic, x: f64) -> Option<Vec<f64>> {
    let coeffs = [k[5] + k[3] * x + k[0] * x * x, k[4] + k[1] * x, k[2]];
    let scale = magnitude(k, x, 1.0).max(f64::MIN_POSITIVE);
    if coeffs.iter().all(|c| c.abs() <= 1e-13 * scale) {
        return None;
    }
    Some(solve_poly(&coeffs).unwrap_or_default())
}

fn newton(k1: &Conic, k2: &Conic, mut x: f64, mut y: f64) -> (f64, f64) {
    for _ in 0..30 {
        let (f1, f2) = (eval(k1, x, y), eval(k2, x, y));
        let j11 = 2.0 * k1[0] * x + k1[1] * y + k1[3];
        let j12 = k1[1] * x + 2.0 * k1[2] * y + k1[4];
        let j21 = 2.0 * k2[0] * x + k2[1] * y + k2[3];
        let j22 = k2[1] * x + 2.0 * k2[2] * y + k2[4];
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (f1 * j22 - f2 * j12) / det;
        let dy = (j11 * f2 - j21 * f1) / det;
        let (nx, ny) = (x - dx, y - dy);
        let before = f1.abs() / magnitude(k1, x, y).max(1e-300) + f2.abs() / magnitude(k2, x, y).max(1e-300);
        let after = eval(k1, nx, ny).abs() / magnitude(k1, nx, ny).max(1e-300)
            + eval(k2, nx, ny).abs() / magnitude(k2, nx, ny).max(1e-300);
        if !(after < before) {
            break;
        }
        x = nx;
        y = ny;
    }
    (x, y)
}

fn on_both(k1: &Conic, k2: &Conic, x: f64, y: f64) -> bool {
    let ok = |k: &Conic| {
        let m = magnitude(k, x, y);
        m == 0.0 || eval(k, x, y).abs() <= RESIDUAL_TOL * m
    };
    ok(k1) && ok(k2)
}

fn intersect(k1: &Conic, k2: &Conic) -> Option<Vec<(f64, f64)>> {
    let res = resultant_in_x(k1, k2);
    let scale = k1.iter().chain(k2.iter()).fold(0.0f64, |m, v| m.max(v.abs())).powi(2).max(f64::MIN_POSITIVE);
    if is_zero_poly(&res, scale) {
        return None;
    }
    let xs = solve_poly(&res).unwrap_or_default();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for x in xs {
        let mut ys = Vec::new();
        let c1 = y_candidates(k1, x);
        let c2 = y_candidates(k2, x);
        if c1.is_none() && c2.is_none() {
            return None;
        }
        ys.extend(c1.unwrap_or_default());
        ys.extend(c2.unwrap_or_default());
        for y in ys {
            let (px, py) = newton(k1, k2, x, y);
            if on_both(k1, k2, px, py) && !pts.iter().any(|&(qx, qy)| close(px, qx) && close(py, qy)) {
                pts.push((px, py));
            }
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Some(pts)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

/// Real intersections of the conics `∂H/∂x = 0` and `∂H/∂y = 0` (numerators only).
pub fn stationary_points(h: &RationalObjective) -> Result<Stationary, RfopError> {
    let k1 = h.conic_x();
    let k2 = h.conic_y();
    if let Some(pts) = intersect(&k1, &k2) {
        return Ok(Stationary::Points(pts));
    }
    if let Some(pts) = intersect(&swap(&k1), &swap(&k2)) {
        let mut pts: Vec<(f64, f64)> = pts.into_iter().map(|(y, x)| (x, y)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        return Ok(Stationary::Points(pts));
    }
    Ok(Stationary::Degenerate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn points(h: &RationalObjective) -> Vec<(f64, f64)> {
        match stationary_points(h).unwrap() {
            Stationary::Points(p) => p,
            Stationary::Degenerate => panic!("unexpected degenerate pair"),
        }
    }

    #[test]
    fn separable_quadratic() {
        let h = RationalObjective::new([1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(points(&h), vec![(0.0, 0.0)]);
    }

    #[test]
    fn shifted_quadratic() {
        // (x − 1)² + (y − 2)² + 5 = x² + y² − 2x − 4y + 10
        let h = RationalObjective::new([1.0, 1.0, 0.0, -2.0, -4.0, 10.0, 0.0, 0.0, 1.0]).unwrap();
        let p = points(&h);
        assert_eq!(p.len(), 1);
        assert!((p[0].0 - 1.0).abs() < 1e-12 && (p[0].1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_objective_is_degenerate() {
        let h = RationalObjective::new([0.0, 0.0, 0.0, 0.0, 0.0, 6.0, 0.0, 0.0, 3.0]).unwrap();
        assert_eq!(stationary_points(&h).unwrap(), Stationary::Degenerate);
    }

    #[test]
    fn rational_stationary_point() {
        // H = (x² + y² + 1) / (x + y + 1) has a saddle-free minimum on the diagonal.
        let h = RationalObjective::new([1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let p = points(&h);
        let r = (3f64.sqrt() - 1.0) / 2.0;
        assert!(p.iter().any(|&(x, y)| (x - r).abs() < 1e-9 && (y - r).abs() < 1e-9), "{p:?}");
    }

    proptest! {
        #[test]
        fn points_have_vanishing_gradient(
            c in proptest::array::uniform6(-3.0f64..3.0),
            d in proptest::array::uniform3(0.0f64..2.0),
        ) {
            let h = RationalObjective::new([c[0], c[1], c[2], c[3], c[4], c[5], d[0], d[1], d[2] + 0.5]).unwrap();
            if let Stationary::Points(pts) = stationary_points(&h).unwrap() {
                // Near-tangential intersections may leave several nearby candidates.
                let mut clusters: Vec<(f64, f64)> = Vec::new();
                for &(x, y) in &pts {
                    let near = |&(a, b): &(f64, f64)| (x - a).hypot(y - b) <= 1e-2 * x.hypot(y).max(1.0);
                    if !clusters.iter().any(near) {
                        clusters.push((x, y));
                    }
                }
                prop_assert!(clusters.len() <= 4, "{:?}", pts);
                for (x, y) in pts {
                    let g = h.denominator(x, y);
                    if g <= 0.1 || x.abs() > 1e3 || y.abs() > 1e3 {
                        continue;
                    }
                    let e = 1e-6 * x.abs().max(y.abs()).max(1.0);
                    let gx = (h.eval(x + e, y) - h.eval(x - e, y)) / (2.0 * e);
                    let gy = (h.eval(x, y + e) - h.eval(x, y - e)) / (2.0 * e);
                    let scale = h.eval(x, y).abs().max(1.0);
                    prop_assert!(gx.abs() <= 1e-5 * scale && gy.abs() <= 1e-5 * scale,
                        "gradient ({}, {}) at ({}, {})", gx, gy, x, y);
                }
            }
        }
    }
}
