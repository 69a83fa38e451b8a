use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Perturbation applied to a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    #[default]
    None,
    /// Growth rates scaled by a uniform factor around one.
    GrowthRate,
    /// Agent speed scaled by a uniform factor drawn per transit.
    Speed,
    /// Targets drift by a bounded second-order random walk.
    Location,
    /// Uncertainty jumps at Poisson arrival times.
    StateShock,
    /// Neighbor uncertainty readings perturbed inside decisions only.
    Channel,
}

impl std::str::FromStr for NoiseModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
            format!("unknown noise model {s:?}; known: none, growth-rate, speed, location, state-shock, channel")
        })
    }
}

fn default_lambda() -> f64 {
    50.0
}

fn default_radius() -> f64 {
    20.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    #[serde(default)]
    pub model: NoiseModel,
    /// Magnitude.
    #[serde(default)]
    pub m: f64,
    /// Mean time between shocks.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Drift radius for the location model.
    #[serde(default = "default_radius")]
    pub radius: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { model: NoiseModel::None, m: 0.0, lambda: default_lambda(), radius: default_radius() }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("noise magnitude must be finite and nonnegative, got {0}")]
    Magnitude(f64),
    #[error("mean shock interval must be positive, got {0}")]
    Lambda(f64),
    #[error("drift radius must be finite and nonnegative, got {0}")]
    Radius(f64),
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(self.m.is_finite() && self.m >= 0.0) {
            return Err(NoiseError::Magnitude(self.m));
        }
        if self.model == NoiseModel::StateShock && !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(NoiseError::Lambda(self.lambda));
        }
        if !(self.radius.is_finite() && self.radius >= 0.0) {
            return Err(NoiseError::Radius(self.radius));
        }
        Ok(())
    }

    /// The model in effect; zero magnitude disables every model.
    pub fn active(&self) -> NoiseModel {
        if self.m == 0.0 {
            NoiseModel::None
        } else {
            self.model
        }
    }
}

/// Independent random streams per noise channel and entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Channel {
    Growth = 1,
    Speed = 2,
    Location = 3,
    Shock = 4,
    Observation = 5,
}

pub(crate) fn stream(seed: u64, channel: Channel, id: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((channel as u64) << 32) | u64::from(id));
    rng
}

/// Uniform draw on `[lo, hi]`.
pub(crate) fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub(crate) fn exponential(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    Exp::new(1.0 / mean).expect("positive rate").sample(rng)
}

pub(crate) const DRIFT_STEP: f64 = 0.1;
pub(crate) const PURSUIT_STEP: f64 = 1e-3;
pub(crate) const ARRIVAL_DISTANCE: f64 = 1e-6;
pub(crate) const MIN_SPEED_FACTOR: f64 = 0.05;

/// Lazily sampled target trajectory under the location model.
#[derive(Debug, Clone)]
pub(crate) struct Drift {
    home: [f64; 2],
    radius: f64,
    m: f64,
    rng: ChaCha8Rng,
    points: Vec<[f64; 2]>,
    velocity: [f64; 2],
}

impl Drift {
    pub fn new(home: [f64; 2], radius: f64, m: f64, rng: ChaCha8Rng) -> Self {
        Self { home, radius, m, rng, points: vec![home], velocity: [0.0; 2] }
    }

    fn extend(&mut self) {
        let dt = DRIFT_STEP;
        let acc = [uniform(&mut self.rng, -self.m, self.m), uniform(&mut self.rng, -self.m, self.m)];
        let last = *self.points.last().expect("nonempty");
        let mut v = [self.velocity[0] + acc[0] * dt, self.velocity[1] + acc[1] * dt];
        let mut p = [last[0] + v[0] * dt, last[1] + v[1] * dt];
        let off = [p[0] - self.home[0], p[1] - self.home[1]];
        let dist = off[0].hypot(off[1]);
        if dist > self.radius {
            let n = [off[0] / dist, off[1] / dist];
            p = [self.home[0] + n[0] * self.radius, self.home[1] + n[1] * self.radius];
            let out = v[0] * n[0] + v[1] * n[1];
            if out > 0.0 {
                v = [v[0] - out * n[0], v[1] - out * n[1]];
            }
        }
        self.velocity = v;
        self.points.push(p);
    }

    pub fn at(&mut self, t: f64) -> [f64; 2] {
        let s = (t / DRIFT_STEP).max(0.0);
        let k = s.floor() as usize;
        while self.points.len() < k + 2 {
            self.extend();
        }
        let f = s - k as f64;
        let (a, b) = (self.points[k], self.points[k + 1]);
        [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]
    }
}

pub(crate) fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Arrival time of an agent leaving `from` at `t0` with speed `speed` and heading straight for
/// the moving target at every step.
pub(crate) fn pursue(from: [f64; 2], t0: f64, speed: f64, target: &mut Drift) -> f64 {
    let step = speed * PURSUIT_STEP;
    let mut p = from;
    let mut k = 0u64;
    loop {
        let t = t0 + k as f64 * PURSUIT_STEP;
        let q = target.at(t);
        let d = distance(p, q);
        if d < ARRIVAL_DISTANCE {
            return t;
        }
        if d <= step {
            return t + d / speed;
        }
        p = [p[0] + (q[0] - p[0]) * step / d, p[1] + (q[1] - p[1]) * step / d];
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<f64> = (0..4).map(|_| 0.0).scan(stream(7, Channel::Growth, 1), |r, _| Some(r.random())).collect();
        let b: Vec<f64> = (0..4).map(|_| 0.0).scan(stream(7, Channel::Growth, 1), |r, _| Some(r.random())).collect();
        let c: Vec<f64> = (0..4).map(|_| 0.0).scan(stream(7, Channel::Growth, 2), |r, _| Some(r.random())).collect();
        let d: Vec<f64> = (0..4).map(|_| 0.0).scan(stream(7, Channel::Speed, 1), |r, _| Some(r.random())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn drift_stays_in_ball() {
        let mut d = Drift::new([100.0, 50.0], 20.0, 5.0, stream(3, Channel::Location, 1));
        for k in 0..5000 {
            let p = d.at(k as f64 * 0.37);
            assert!(distance(p, [100.0, 50.0]) <= 20.0 + 1e-9);
        }
    }

    #[test]
    fn pursuit_of_fixed_target_is_straight_line() {
        let mut d = Drift::new([100.0, 0.0], 20.0, 0.0, stream(1, Channel::Location, 1));
        let t = pursue([0.0, 0.0], 2.0, 50.0, &mut d);
        assert!((t - 4.0).abs() < 1e-9, "{t}");
    }

    #[test]
    fn model_names() {
        assert_eq!("state-shock".parse::<NoiseModel>().unwrap(), NoiseModel::StateShock);
        assert!("gauss".parse::<NoiseModel>().is_err());
        let c = NoiseConfig { model: NoiseModel::Speed, ..Default::default() };
        assert_eq!(c.active(), NoiseModel::None);
    }
}
