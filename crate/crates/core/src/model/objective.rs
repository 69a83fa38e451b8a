use thiserror::Error;

use super::dynamics::{integrate, TargetState};

/// One target of a local neighborhood with its projected parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Member {
    pub target: usize,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    /// Multiplier applied to this target's contribution.
    pub weight: f64,
}

impl Member {
    pub fn new(target: usize, r: f64, a: f64, b: f64) -> Self {
        Self { target, r, a, b, weight: 1.0 }
    }
}

/// A planned agent presence at `target` starting `arrive` time units into the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannedVisit {
    pub target: usize,
    pub arrive: f64,
    pub dwell: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("planned visit to target {0} which is not in the neighborhood")]
    UnknownTarget(usize),
    #[error("planned visit to target {0} has a negative or non-finite time")]
    BadVisit(usize),
    #[error("planned visits to target {0} overlap")]
    Overlap(usize),
    #[error("window length {0} must be finite and nonnegative")]
    BadWindow(f64),
}

/// Weighted integral of projected uncertainty over `[0, w)` for every member.
///
/// Members without a planned visit grow at their own rate for the whole window.
pub fn local_objective(members: &[Member], visits: &[PlannedVisit], w: f64) -> Result<f64, ObjectiveError> {
    if !(w >= 0.0 && w.is_finite()) {
        return Err(ObjectiveError::BadWindow(w));
    }
    for v in visits {
        if !members.iter().any(|m| m.target == v.target) {
            return Err(ObjectiveError::UnknownTarget(v.target));
        }
        if !(v.arrive >= 0.0 && v.dwell >= 0.0 && v.arrive.is_finite() && v.dwell.is_finite()) {
            return Err(ObjectiveError::BadVisit(v.target));
        }
    }
    let mut total = 0.0;
    for m in members {
        let mut own: Vec<&PlannedVisit> = visits.iter().filter(|v| v.target == m.target).collect();
        own.sort_by(|x, y| x.arrive.total_cmp(&y.arrive));
        let mut state = TargetState::new(m.r, m.a, m.b, 0, 0.0);
        let mut cost = 0.0;
        for v in own {
            if v.arrive < state.last_event_time {
                return Err(ObjectiveError::Overlap(m.target));
            }
            let grow_until = v.arrive.min(w);
            if grow_until > state.last_event_time {
                let (c, s) = integrate(state, m.a, m.b, 0, grow_until - state.last_event_time);
                cost += c;
                state = s;
            }
            let leave = (v.arrive + v.dwell).min(w);
            if leave > state.last_event_time {
                let (c, s) = integrate(state, m.a, m.b, 1, leave - state.last_event_time);
                cost += c;
                state = s;
            }
        }
        if w > state.last_event_time {
            let (c, _) = integrate(state, m.a, m.b, 0, w - state.last_event_time);
            cost += c;
        }
        total += m.weight * cost;
    }
    Ok(total)
}
