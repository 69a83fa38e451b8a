use super::objective::RfopError;

/// Roots closer than this (relative) are merged.
const DEDUP_TOL: f64 = 1e-6;
/// Monic discriminants below this magnitude switch to subdivision root isolation.
const DISC_TOL: f64 = 1e-10;

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
}

/// Drops negligible leading coefficients. Coefficients are in ascending powers.
fn trim(p: &[f64]) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut v = p.to_vec();
    while v.len() > 1 && v.last().is_some_and(|c| c.abs() <= 1e-14 * scale) {
        v.pop();
    }
    v
}

fn residual_scale(p: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    p.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
}

fn polish(p: &[f64], mut x: f64) -> f64 {
    let dp = derivative(p);
    for _ in 0..8 {
        let fx = horner(p, x);
        if fx == 0.0 {
            break;
        }
        let d = horner(&dp, x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = fx / d;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..6 {
            let cand = x - lambda * step;
            if horner(p, cand).abs() < fx.abs() {
                x = cand;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    x
}

fn dedup(mut roots: Vec<f64>) -> Vec<f64> {
    roots.retain(|r| r.is_finite());
    roots.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last() {
            Some(&last) if (r - last).abs() <= DEDUP_TOL * r.abs().max(last.abs()).max(1.0) => {}
            _ => out.push(r),
        }
    }
    out
}

fn solve_linear(p: &[f64]) -> Vec<f64> {
    vec![-p[0] / p[1]]
}

fn solve_quadratic(p: &[f64]) -> Vec<f64> {
    let (c, b, a) = (p[0], p[1], p[2]);
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).abs().max((4.0 * a * c).abs());
    if disc < -1e-14 * scale {
        return Vec::new();
    }
    if disc <= 1e-14 * scale {
        return vec![-b / (2.0 * a)];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let q = if q == 0.0 { -0.5 * disc.sqrt() } else { q };
    let mut v = vec![q / a];
    if q != 0.0 {
        v.push(c / q);
    }
    v
}

fn solve_cubic(p: &[f64]) -> Vec<f64> {
    let (a, b, c) = (p[2] / p[3], p[1] / p[3], p[0] / p[3]);
    let q = (a * a - 3.0 * b) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    let q3 = q * q * q;
    let roots = if r * r < q3 {
        let theta = (r / q3.sqrt()).clamp(-1.0, 1.0).acos();
        let s = -2.0 * q.sqrt();
        let tau = std::f64::consts::TAU;
        vec![
            s * (theta / 3.0).cos() - a / 3.0,
            s * ((theta + tau) / 3.0).cos() - a / 3.0,
            s * ((theta - tau) / 3.0).cos() - a / 3.0,
        ]
    } else {
        let big = -r.signum() * (r.abs() + (r * r - q3).sqrt()).cbrt();
        let small = if big != 0.0 { q / big } else { 0.0 };
        vec![big + small - a / 3.0]
    };
    roots.into_iter().map(|x| polish(p, x)).collect()
}

/// Real roots of a polynomial of degree ≤ 4 by recursive isolation between critical points.
fn isolate(p: &[f64]) -> Vec<f64> {
    let p = trim(p);
    let deg = p.len() - 1;
    match deg {
        0 => return Vec::new(),
        1 => return solve_linear(&p),
        _ => {}
    }
    let lead = p[deg];
    let bound = 1.0 + p[..deg].iter().fold(0.0f64, |m, c| m.max((c / lead).abs()));
    let mut crit: Vec<f64> = isolate(&derivative(&p)).into_iter().filter(|x| x.abs() < bound).collect();
    crit.sort_by(f64::total_cmp);
    let mut knots = vec![-bound];
    knots.extend(crit.iter().copied());
    knots.push(bound);
    let mut roots = Vec::new();
    let tol = 1e-12;
    for &c in &crit {
        if horner(&p, c).abs() <= tol * residual_scale(&p, c) {
            roots.push(c);
        }
    }
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (mut flo, fhi) = (horner(&p, lo), horner(&p, hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() || fhi == 0.0 {
            if fhi == 0.0 {
                roots.push(hi);
            }
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = horner(&p, mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    dedup(roots)
}

fn quartic_discriminant(p: &[f64]) -> f64 {
    let (e, d, c, b, a) = (p[0] / p[4], p[1] / p[4], p[2] / p[4], p[3] / p[4], 1.0);
    256.0 * a * a * a * e * e * e - 192.0 * a * a * b * d * e * e - 128.0 * a * a * c * c * e * e
        + 144.0 * a * a * c * d * d * e
        - 27.0 * a * a * d * d * d * d
        + 144.0 * a * b * b * c * e * e
        - 6.0 * a * b * b * d * d * e
        - 80.0 * a * b * c * c * d * e
        + 18.0 * a * b * c * d * d * d
        + 16.0 * a * c * c * c * c * e
        - 4.0 * a * c * c * c * d * d
        - 27.0 * b * b * b * b * e * e
        + 18.0 * b * b * b * c * d * e
        - 4.0 * b * b * b * d * d * d
        - 4.0 * b * b * c * c * c * e
        + b * b * c * c * d * d
}

/// Ferrari's method through the resolvent cubic.
fn ferrari(p: &[f64]) -> Option<Vec<f64>> {
    let (a, b, c, d) = (p[3] / p[4], p[2] / p[4], p[1] / p[4], p[0] / p[4]);
    let pp = b - 3.0 * a * a / 8.0;
    let qq = c - a * b / 2.0 + a * a * a / 8.0;
    let rr = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
    let shift = -a / 4.0;
    let scale = 1.0 + pp.abs() + qq.abs() + rr.abs();
    let mut ts = Vec::new();
    if qq.abs() <= 1e-14 * scale {
        for z in solve_quadratic(&[rr, pp, 1.0]) {
            if z >= 0.0 {
                ts.push(z.sqrt());
                ts.push(-z.sqrt());
            }
        }
    } else {
        let resolvent = [-qq * qq / 8.0, pp * pp / 4.0 - rr, pp, 1.0];
        let m = solve_cubic(&resolvent).into_iter().filter(|&m| m > 0.0).fold(f64::NAN, f64::max);
        if !(m > 0.0) {
            return None;
        }
        let s = (2.0 * m).sqrt();
        let k = qq / (2.0 * s);
        ts.extend(solve_quadratic(&[pp / 2.0 + m + k, -s, 1.0]));
        ts.extend(solve_quadratic(&[pp / 2.0 + m - k, s, 1.0]));
    }
    Some(ts.into_iter().map(|t| polish(p, t + shift)).collect())
}

/// Sorted distinct real roots of `a4 t⁴ + a3 t³ + a2 t² + a1 t + a0`.
pub fn solve_quartic(a4: f64, a3: f64, a2: f64, a1: f64, a0: f64) -> Result<Vec<f64>, RfopError> {
    solve_poly(&[a0, a1, a2, a3, a4])
}

/// Sorted distinct real roots of a polynomial of degree ≤ 4 in ascending coefficients.
pub fn solve_poly(coeffs: &[f64]) -> Result<Vec<f64>, RfopError> {
    if coeffs.iter().all(|&c| c == 0.0) {
        return Err(RfopError::ZeroPolynomial);
    }
    let p = trim(coeffs);
    let roots = match p.len() - 1 {
        0 => Vec::new(),
        1 => solve_linear(&p),
        2 => solve_quadratic(&p).into_iter().map(|x| polish(&p, x)).collect(),
        3 => solve_cubic(&p),
        4 => {
            let disc = quartic_discriminant(&p);
            let scale = p[..4].iter().fold(1.0f64, |m, c| m.max((c / p[4]).abs())).powi(6);
            match ferrari(&p) {
                Some(r) if disc.abs() >= DISC_TOL * scale && accepted(&p, &r, disc) => r,
                _ => isolate(&p),
            }
        }
        _ => isolate(&p),
    };
    Ok(dedup(roots))
}

fn accepted(p: &[f64], roots: &[f64], disc: f64) -> bool {
    let ok = roots.iter().all(|&x| x.is_finite() && horner(p, x).abs() <= 1e-8 * residual_scale(p, x).max(1.0));
    let n = dedup(roots.to_vec()).len();
    let count_ok = if disc > 0.0 { n == 0 || n == 4 } else { n == 2 };
    ok && count_ok
}
