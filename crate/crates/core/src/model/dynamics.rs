use thiserror::Error;

/// Crossings closer than this to an interval endpoint are snapped onto it.
pub const CROSSING_SNAP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("duration must be finite and nonnegative, got {0}")]
    NegativeDuration(f64),
}

/// Uncertainty of one target at `last_event_time`, and its rate from then on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetState {
    pub r: f64,
    pub rdot: f64,
    pub last_event_time: f64,
}

impl TargetState {
    pub fn new(r: f64, a: f64, b: f64, n: u32, time: f64) -> Self {
        Self { r, rdot: rate(r, a, b, n), last_event_time: time }
    }
}

/// Rate of change of uncertainty with `n` agents present.
pub fn rate(r: f64, a: f64, b: f64, n: u32) -> f64 {
    let raw = a - b * f64::from(n);
    if r > 0.0 || raw > 0.0 {
        raw
    } else {
        0.0
    }
}

/// Result of advancing a target state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    pub state: TargetState,
    /// Absolute time at which uncertainty reached zero inside the interval, if it did.
    pub crossing: Option<f64>,
}

/// Advances `state` by `dt` with `n` agents present.
pub fn evolve_target(state: TargetState, a: f64, b: f64, n: u32, dt: f64) -> Result<Evolution, DynamicsError> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(DynamicsError::NegativeDuration(dt));
    }
    let start = state.last_event_time;
    let end = start + dt;
    let slope = rate(state.r, a, b, n);
    if slope < 0.0 {
        let tz = state.r / -slope;
        if tz <= dt + CROSSING_SNAP {
            let at = if tz <= CROSSING_SNAP {
                start
            } else if tz >= dt - CROSSING_SNAP {
                end
            } else {
                start + tz
            };
            return Ok(Evolution {
                state: TargetState { r: 0.0, rdot: rate(0.0, a, b, n), last_event_time: end },
                crossing: Some(at),
            });
        }
    }
    let r = (state.r + slope * dt).max(0.0);
    Ok(Evolution { state: TargetState { r, rdot: rate(r, a, b, n), last_event_time: end }, crossing: None })
}

/// Integral of a linear uncertainty profile over an interval of constant rate.
pub fn segment_cost(r0: f64, rdot: f64, dt: f64) -> f64 {
    0.5 * dt * (2.0 * r0 + rdot * dt)
}

/// Integral over a dwell that drives `r0` toward zero in `u0`, followed by `u1` of growth
/// from zero. Idle time at zero contributes nothing.
pub fn visit_cost(r0: f64, u0: f64, u1: f64, a: f64, b: f64) -> f64 {
    0.5 * u0 * (2.0 * r0 - (b - a) * u0) + 0.5 * u1 * (a * u1)
}

/// Integral of the uncertainty over `dt` starting from `state`, splitting at a zero crossing.
/// Returns the cost and the state at the end of the interval.
pub fn integrate(state: TargetState, a: f64, b: f64, n: u32, dt: f64) -> (f64, TargetState) {
    let slope = rate(state.r, a, b, n);
    if slope < 0.0 {
        let tz = state.r / -slope;
        if tz < dt {
            let cost = segment_cost(state.r, slope, tz);
            let tail = rate(0.0, a, b, n);
            let end = TargetState { r: tail * (dt - tz), rdot: tail, last_event_time: state.last_event_time + dt };
            return (cost + segment_cost(0.0, tail, dt - tz), end);
        }
    }
    let cost = segment_cost(state.r, slope, dt);
    let r = (state.r + slope * dt).max(0.0);
    (cost, TargetState { r, rdot: rate(r, a, b, n), last_event_time: state.last_event_time + dt })
}
