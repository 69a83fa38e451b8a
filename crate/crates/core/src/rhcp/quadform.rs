use crate::rfop::{solve_rfop, PolytopeBounds, RationalObjective};

/// Affine function `c + Σ z[k]·v_k` of the four plan variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Affine4 {
    pub c: f64,
    pub z: [f64; 4],
}

impl Affine4 {
    pub fn constant(c: f64) -> Self {
        Self { c, z: [0.0; 4] }
    }

    pub fn var(k: usize) -> Self {
        let mut z = [0.0; 4];
        z[k] = 1.0;
        Self { c: 0.0, z }
    }

    pub fn plus(self, o: Self) -> Self {
        let mut z = self.z;
        for k in 0..4 {
            z[k] += o.z[k];
        }
        Self { c: self.c + o.c, z }
    }

    pub fn scaled(self, s: f64) -> Self {
        Self { c: self.c * s, z: self.z.map(|v| v * s) }
    }

    pub fn eval(&self, v: &[f64; 4]) -> f64 {
        self.c + (0..4).map(|k| self.z[k] * v[k]).sum::<f64>()
    }
}

/// Sum of the given variables plus a constant.
pub fn sum_of(c: f64, vars: &[usize]) -> Affine4 {
    vars.iter().fold(Affine4::constant(c), |acc, &k| acc.plus(Affine4::var(k)))
}

/// Quadratic polynomial in four plan variables; `q[a][b]` with `a ≤ b` holds the `v_a v_b`
/// coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quad4 {
    pub q: [[f64; 4]; 4],
    pub l: [f64; 4],
    pub c: f64,
}

/// Pairs in the order `v1², v2², v3², v4², v1v2, v1v3, v1v4, v2v3, v2v4, v3v4`.
const PAIRS: [(usize, usize); 10] = [(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Quad4 {
    /// From the 15-entry table: ten quadratic terms, four linear terms, constant.
    pub fn from_table(t: &[f64; 15]) -> Self {
        let mut out = Self::default();
        for (k, &(a, b)) in PAIRS.iter().enumerate() {
            out.q[a][b] = t[k];
        }
        out.l.copy_from_slice(&t[10..14]);
        out.c = t[14];
        out
    }

    pub fn table(&self) -> [f64; 15] {
        let mut t = [0.0; 15];
        for (k, &(a, b)) in PAIRS.iter().enumerate() {
            t[k] = self.q[a][b];
        }
        t[10..14].copy_from_slice(&self.l);
        t[14] = self.c;
        t
    }

    pub fn product(a: &Affine4, b: &Affine4) -> Self {
        let mut out = Self::default();
        for x in 0..4 {
            for y in 0..4 {
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                out.q[lo][hi] += a.z[x] * b.z[y];
            }
            out.l[x] += a.z[x] * b.c + b.z[x] * a.c;
        }
        out.c = a.c * b.c;
        out
    }

    pub fn plus(mut self, o: &Self) -> Self {
        for a in 0..4 {
            for b in 0..4 {
                self.q[a][b] += o.q[a][b];
            }
            self.l[a] += o.l[a];
        }
        self.c += o.c;
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for row in &mut self.q {
            for v in row {
                *v *= s;
            }
        }
        for v in &mut self.l {
            *v *= s;
        }
        self.c *= s;
        self
    }

    pub fn eval(&self, v: &[f64; 4]) -> f64 {
        let mut s = self.c;
        for a in 0..4 {
            s += self.l[a] * v[a];
            for b in a..4 {
                s += self.q[a][b] * v[a] * v[b];
            }
        }
        s
    }

    /// Substitutes `v_k = map[k]` and returns `[x², y², xy, x, y, 1]` coefficients.
    pub fn substitute(&self, map: &[Affine2; 4]) -> [f64; 6] {
        let mut out = [0.0; 6];
        let mut add = |coef: f64, a: &Affine2, b: &Affine2| {
            out[0] += coef * a.x * b.x;
            out[1] += coef * a.y * b.y;
            out[2] += coef * (a.x * b.y + a.y * b.x);
            out[3] += coef * (a.x * b.c + a.c * b.x);
            out[4] += coef * (a.y * b.c + a.c * b.y);
            out[5] += coef * a.c * b.c;
        };
        for a in 0..4 {
            for b in a..4 {
                if self.q[a][b] != 0.0 {
                    add(self.q[a][b], &map[a], &map[b]);
                }
            }
        }
        for a in 0..4 {
            out[3] += self.l[a] * map[a].x;
            out[4] += self.l[a] * map[a].y;
            out[5] += self.l[a] * map[a].c;
        }
        out[5] += self.c;
        out
    }
}

/// Integral of a linear profile starting at `r0` with slope `rate` over a duration `d`,
/// where `r0` and `d` depend affinely on the plan variables.
pub fn segment(r0: &Affine4, rate: f64, d: &Affine4) -> Quad4 {
    Quad4::product(d, r0).plus(&Quad4::product(d, d).scaled(0.5 * rate))
}

/// Affine function `c + x·X + y·Y` of the two RFOP variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub c: f64,
    pub x: f64,
    pub y: f64,
}

impl Affine2 {
    pub const ZERO: Self = Self { c: 0.0, x: 0.0, y: 0.0 };
    pub const X: Self = Self { c: 0.0, x: 1.0, y: 0.0 };
    pub const Y: Self = Self { c: 0.0, x: 0.0, y: 1.0 };

    pub fn constant(c: f64) -> Self {
        Self { c, x: 0.0, y: 0.0 }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.c + self.x * x + self.y * y
    }
}

/// One structural case: how the four plan variables depend on `(x, y)` and the polytope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseMap {
    pub vars: [Affine2; 4],
    pub bounds: PolytopeBounds,
}

/// Best plan over all cases of `numerator / (lead + Σ v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSolution {
    pub case: usize,
    pub vars: [f64; 4],
    pub cost: f64,
}

/// Solves every feasible case and keeps the cheapest; equal costs keep the earlier case.
pub fn solve_cases(numerator: &Quad4, lead: f64, cases: &[CaseMap]) -> Option<CaseSolution> {
    let mut best: Option<CaseSolution> = None;
    for (idx, case) in cases.iter().enumerate() {
        let n = numerator.substitute(&case.vars);
        let (mut c7, mut c8, mut c9) = (0.0, 0.0, lead);
        for v in &case.vars {
            c7 += v.x;
            c8 += v.y;
            c9 += v.c;
        }
        let Ok(h) = RationalObjective::new([n[0], n[1], n[2], n[3], n[4], n[5], c7, c8, c9]) else {
            continue;
        };
        let Ok(sol) = solve_rfop(&h, &case.bounds) else {
            continue;
        };
        let vars = case.vars.map(|a| a.eval(sol.x, sol.y).max(0.0));
        let better = match &best {
            None => true,
            Some(b) => sol.value < b.cost - 1e-12 * b.cost.abs().max(1.0),
        };
        if better {
            best = Some(CaseSolution { case: idx, vars, cost: sol.value });
        }
    }
    best
}
