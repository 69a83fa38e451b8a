use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RfopError {
    #[error("objective coefficients must be finite with C7 >= 0, C8 >= 0 and C9 > 0")]
    InvalidObjective,
    #[error("polytope bounds must be nonnegative (P, Q finite; L, M, N may be infinite)")]
    InvalidBounds,
    #[error("polytope is empty (M < 0)")]
    Infeasible,
    #[error("polynomial degree too high for a constant convexity indicator")]
    Degree,
    #[error("empty or inverted interval [{0}, {1}]")]
    EmptyInterval(f64, f64),
    #[error("all polynomial coefficients are zero")]
    ZeroPolynomial,
}

/// `H(x, y) = (C1 x² + C2 y² + C3 xy + C4 x + C5 y + C6) / (C7 x + C8 y + C9)`,
/// stored as `c[0] = C1, …, c[8] = C9`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalObjective {
    pub c: [f64; 9],
}

impl RationalObjective {
    pub fn new(c: [f64; 9]) -> Result<Self, RfopError> {
        if c.iter().any(|v| !v.is_finite()) || c[6] < 0.0 || c[7] < 0.0 || c[8] <= 0.0 {
            return Err(RfopError::InvalidObjective);
        }
        Ok(Self { c })
    }

    pub fn numerator(&self, x: f64, y: f64) -> f64 {
        let c = &self.c;
        c[0] * x * x + c[1] * y * y + c[2] * x * y + c[3] * x + c[4] * y + c[5]
    }

    pub fn denominator(&self, x: f64, y: f64) -> f64 {
        self.c[6] * x + self.c[7] * y + self.c[8]
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.numerator(x, y) / self.denominator(x, y)
    }

    /// Coefficients `[x², xy, y², x, y, 1]` of the numerator of `∂H/∂x`.
    pub fn conic_x(&self) -> [f64; 6] {
        let [c1, c2, c3, c4, c5, c6, c7, c8, c9] = self.c;
        [c1 * c7, 2.0 * c1 * c8, c3 * c8 - c7 * c2, 2.0 * c1 * c9, c3 * c9 + c4 * c8 - c7 * c5, c4 * c9 - c7 * c6]
    }

    /// Coefficients `[x², xy, y², x, y, 1]` of the numerator of `∂H/∂y`.
    pub fn conic_y(&self) -> [f64; 6] {
        let [c1, c2, c3, c4, c5, c6, c7, c8, c9] = self.c;
        [c3 * c7 - c8 * c1, 2.0 * c2 * c7, c2 * c8, c3 * c9 + c5 * c7 - c8 * c4, 2.0 * c2 * c9, c5 * c9 - c8 * c6]
    }
}

/// Feasible set `{0 ≤ x ≤ N, 0 ≤ y ≤ min(P x + L, −Q x + M)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolytopeBounds {
    pub p: f64,
    pub q: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl PolytopeBounds {
    pub fn validate(&self) -> Result<(), RfopError> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let nonneg = |v: f64| !v.is_nan() && v >= 0.0;
        if !(finite_nonneg(self.p) && finite_nonneg(self.q) && nonneg(self.l) && nonneg(self.n)) {
            return Err(RfopError::InvalidBounds);
        }
        if self.m.is_nan() {
            return Err(RfopError::InvalidBounds);
        }
        if self.m < 0.0 {
            return Err(RfopError::Infeasible);
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64, tol: f64) -> bool {
        x >= -tol && x <= self.n + tol && y >= -tol && y <= self.p * x + self.l + tol && y <= -self.q * x + self.m + tol
    }
}

/// Minimizer found by [`super::solve_rfop`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfopSolution {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    /// True when an unbounded direction was clipped at the large box.
    pub clipped: bool,
}
