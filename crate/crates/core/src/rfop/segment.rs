use super::objective::{RationalObjective, RfopError};

/// Relative tolerance used when deciding the sign of `Δ_h` and `h'`.
const SIGN_TOL: f64 = 1e-12;

/// `h(r) = f(r) / g(r)` with `f = f0 + f1 r + f2 r²` and `g = g0 + g1 r`, on `[r0, r1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentRestriction {
    pub f: [f64; 3],
    pub g: [f64; 2],
}

impl SegmentRestriction {
    pub fn eval(&self, r: f64) -> f64 {
        self.f_at(r) / self.g_at(r)
    }

    fn f_at(&self, r: f64) -> f64 {
        self.f[0] + r * (self.f[1] + r * self.f[2])
    }

    fn g_at(&self, r: f64) -> f64 {
        self.g[0] + self.g[1] * r
    }

    /// Numerator of `h'(r)`, which has the sign of `h'(r)` wherever `g > 0`.
    pub fn slope_numerator(&self, r: f64) -> f64 {
        let [f0, f1, f2] = self.f;
        let [g0, g1] = self.g;
        g0 * f1 - g1 * f0 + 2.0 * g0 * f2 * r + g1 * f2 * r * r
    }

    fn slope_scale(&self, r: f64) -> f64 {
        let [f0, f1, f2] = self.f;
        let [g0, g1] = self.g;
        (g0 * f1).abs() + (g1 * f0).abs() + (2.0 * g0 * f2 * r).abs() + (g1 * f2 * r * r).abs()
    }

    pub fn delta(&self) -> f64 {
        let [f0, f1, f2] = self.f;
        let [g0, g1] = self.g;
        2.0 * f2 * g0 * g0 - 2.0 * g1 * (g0 * f1 - g1 * f0)
    }

    fn delta_scale(&self) -> f64 {
        let [f0, f1, f2] = self.f;
        let [g0, g1] = self.g;
        (2.0 * f2 * g0 * g0).abs() + (2.0 * g1 * g0 * f1).abs() + (2.0 * g1 * g1 * f0).abs()
    }
}

/// Convexity indicator `g(g f'' − f g'') − 2 g'(g f' − f g')` for `deg f ≤ 2`, `deg g ≤ 1`,
/// where it does not depend on `r`. Coefficients are in ascending powers.
pub fn delta_h(f: &[f64], g: &[f64]) -> Result<f64, RfopError> {
    delta_h_at(f, g, 0.0)
}

/// The convexity indicator evaluated at `r` from the general expression.
pub fn delta_h_at(f: &[f64], g: &[f64], r: f64) -> Result<f64, RfopError> {
    if f.len() > 3 || g.len() > 2 {
        return Err(RfopError::Degree);
    }
    let coef = |p: &[f64], k: usize| p.get(k).copied().unwrap_or(0.0);
    let (f0, f1, f2) = (coef(f, 0), coef(f, 1), coef(f, 2));
    let (g0, g1) = (coef(g, 0), coef(g, 1));
    let fv = f0 + f1 * r + f2 * r * r;
    let fd = f1 + 2.0 * f2 * r;
    let fdd = 2.0 * f2;
    let gv = g0 + g1 * r;
    Ok(gv * (gv * fdd) - 2.0 * g1 * (gv * fd - fv * g1))
}

/// Restriction of `H` to the line through `(x0, y0)` with direction `(dx, dy)`:
/// `h(r) = H(x0 + dx r, y0 + dy r)`.
pub fn restrict_to_line(h: &RationalObjective, anchor: (f64, f64), dir: (f64, f64)) -> SegmentRestriction {
    let [c1, c2, c3, c4, c5, _, c7, c8, c9] = h.c;
    let (x0, y0) = anchor;
    let (dx, dy) = dir;
    SegmentRestriction {
        f: [
            h.numerator(x0, y0),
            dx * (2.0 * c1 * x0 + c3 * y0 + c4) + dy * (2.0 * c2 * y0 + c3 * x0 + c5),
            c1 * dx * dx + c2 * dy * dy + c3 * dx * dy,
        ],
        g: [c7 * x0 + c8 * y0 + c9, c7 * dx + c8 * dy],
    }
}

/// Line parameterized by `x`: `(x0 + r, y0 + m r)`.
pub fn restrict_along_x(h: &RationalObjective, anchor: (f64, f64), m: f64) -> SegmentRestriction {
    restrict_to_line(h, anchor, (1.0, m))
}

/// Line parameterized by `y`: `(x0 + n r, y0 + r)`.
pub fn restrict_along_y(h: &RationalObjective, anchor: (f64, f64), n: f64) -> SegmentRestriction {
    restrict_to_line(h, anchor, (n, 1.0))
}

fn sign(v: f64, scale: f64) -> i8 {
    if v.abs() <= SIGN_TOL * scale {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Smallest root of `a r² + b r + c` strictly above `lo`, if any.
fn quadratic_root_above(a: f64, b: f64, c: f64, lo: f64) -> Option<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return None;
    }
    let mut roots = Vec::with_capacity(2);
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let q = -0.5 * (b + b.signum() * s);
            if q != 0.0 {
                roots.push(q / a);
                roots.push(c / q);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots.into_iter().filter(|&r| r > lo).min_by(f64::total_cmp)
}

/// Minimizes `h` over `[r0, r1]` using the sign of its convexity indicator and of `h'(r0)`.
/// Ties resolve to the smaller `r`.
pub fn minimize_segment(h: &SegmentRestriction, r0: f64, r1: f64) -> Result<(f64, f64), RfopError> {
    if !(r0 <= r1) || r0.is_nan() || r1.is_nan() {
        return Err(RfopError::EmptyInterval(r0, r1));
    }
    let dsign = sign(h.delta(), h.delta_scale());
    let ssign = sign(h.slope_numerator(r0), h.slope_scale(r0));
    let [f0, f1, f2] = h.f;
    let [g0, g1] = h.g;
    let candidate = if dsign < 0 && ssign > 0 {
        // Concave and increasing: the far end wins only past the break-even point.
        let h0 = h.eval(r0);
        let sharp = if f2 != 0.0 { -(f1 - h0 * g1) / f2 - r0 } else { f64::INFINITY };
        if sharp > r0 && r1 > sharp {
            r1
        } else {
            r0
        }
    } else if dsign > 0 && ssign < 0 {
        // Convex and decreasing: stop at the stationary point if it lies inside.
        match quadratic_root_above(f2 * g1, 2.0 * f2 * g0, g0 * f1 - f0 * g1, r0) {
            Some(sharp) if r1 > sharp => sharp,
            _ => r1,
        }
    } else if dsign >= 0 && ssign >= 0 {
        r0
    } else {
        r1
    };
    let mut best = (candidate, h.eval(candidate));
    for r in [r0, r1] {
        let v = h.eval(r);
        let tol = 1e-12 * best.1.abs().max(1.0);
        if v < best.1 - tol || (v <= best.1 + tol && r < best.0) {
            best = (r, v);
        }
    }
    Ok(best)
}
