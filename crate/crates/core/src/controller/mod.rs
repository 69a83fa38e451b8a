//! Agent controllers behind a common trait, built by name at runtime.

mod periodic;
mod rhc;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rhcp::{ControlDecision, RhcpContext};

pub use periodic::PeriodicBaseline;
pub use rhc::{DenominatorFree, ExRhcAlphaBeta, Rhc, RhcAlpha};

/// Decision logic of one agent. Each agent owns its own instance.
pub trait Controller: Send {
    fn name(&self) -> &'static str;

    /// Arrival, or a neighbor coverage change while the current target is being cleared.
    fn plan_active(&mut self, ctx: &RhcpContext) -> Option<ControlDecision>;

    /// Zero crossing, or a neighbor coverage change while idling.
    fn plan_idle(&mut self, ctx: &RhcpContext) -> Option<ControlDecision>;

    /// End of the active or idle time: choose where to go next.
    fn plan_departure(&mut self, ctx: &RhcpContext) -> Option<ControlDecision>;

    /// Whether decisions read targets two hops away.
    fn two_hop(&self) -> bool {
        false
    }
}

/// A weight that is either fixed or taken from the neighborhood size at each decision.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Fixed(f64),
    #[default]
    #[serde(with = "nominal_tag")]
    Nominal,
}

mod nominal_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("nominal")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "nominal" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected a number or \"nominal\", got {s:?}")))
        }
    }
}

impl Weight {
    pub fn resolve(self, nominal: f64) -> f64 {
        match self {
            Weight::Fixed(v) => v,
            Weight::Nominal => nominal,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Fixed(v) => write!(f, "{v}"),
            Weight::Nominal => f.write_str("nominal"),
        }
    }
}

impl std::str::FromStr for Weight {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "nominal" {
            return Ok(Weight::Nominal);
        }
        s.parse::<f64>().map(Weight::Fixed).map_err(|e| format!("bad weight {s:?}: {e}"))
    }
}

/// Parameters shared by every controller factory.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControllerParams {
    #[serde(default)]
    pub alpha: Weight,
    #[serde(default)]
    pub beta: Weight,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControllerError {
    #[error("unknown controller {name:?}; known: {known}")]
    Unknown { name: String, known: String },
    #[error("weight {0} outside [0, 1]")]
    Weight(f64),
    #[error("weights alpha {0} and beta {1} sum above 1")]
    WeightSum(f64, f64),
}

type Factory = Box<dyn Fn(&ControllerParams) -> Result<Box<dyn Controller>, ControllerError> + Send + Sync>;

/// Controller factories keyed by name.
pub struct ControllerRegistry {
    factories: BTreeMap<&'static str, Factory>,
}

impl ControllerRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn register<F>(&mut self, name: &'static str, factory: F)
    where
        F: Fn(&ControllerParams) -> Result<Box<dyn Controller>, ControllerError> + Send + Sync + 'static,
    {
        self.factories.insert(name, Box::new(factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn build(&self, name: &str, params: &ControllerParams) -> Result<Box<dyn Controller>, ControllerError> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| ControllerError::Unknown { name: name.to_string(), known: self.names().join(", ") })?;
        factory(params)
    }
}

fn check_weight(w: Weight) -> Result<(), ControllerError> {
    match w {
        Weight::Fixed(v) if !(0.0..=1.0).contains(&v) => Err(ControllerError::Weight(v)),
        _ => Ok(()),
    }
}

impl Default for ControllerRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("rhc", |_| Ok(Box::new(Rhc)));
        r.register("rhc_alpha", |p| {
            check_weight(p.alpha)?;
            Ok(Box::new(RhcAlpha { alpha: p.alpha }))
        });
        r.register("ex_rhc_alpha_beta", |p| {
            check_weight(p.alpha)?;
            check_weight(p.beta)?;
            if let (Weight::Fixed(a), Weight::Fixed(b)) = (p.alpha, p.beta) {
                if a + b > 1.0 {
                    return Err(ControllerError::WeightSum(a, b));
                }
            }
            Ok(Box::new(ExRhcAlphaBeta { alpha: p.alpha, beta: p.beta }))
        });
        r.register("denominator_free", |_| Ok(Box::new(DenominatorFree)));
        r.register("periodic_baseline", |_| Ok(Box::new(PeriodicBaseline::default())));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_names() {
        let r = ControllerRegistry::default();
        assert_eq!(r.names(), vec!["denominator_free", "ex_rhc_alpha_beta", "periodic_baseline", "rhc", "rhc_alpha"]);
        for n in r.names() {
            assert_eq!(r.build(n, &ControllerParams::default()).unwrap().name(), n);
        }
    }

    #[test]
    fn unknown_and_bad_weights() {
        let r = ControllerRegistry::default();
        assert!(matches!(r.build("ipa", &ControllerParams::default()), Err(ControllerError::Unknown { .. })));
        let p = ControllerParams { alpha: Weight::Fixed(1.5), beta: Weight::Nominal };
        assert!(matches!(r.build("rhc_alpha", &p), Err(ControllerError::Weight(_))));
        let p = ControllerParams { alpha: Weight::Fixed(0.6), beta: Weight::Fixed(0.6) };
        assert!(matches!(r.build("ex_rhc_alpha_beta", &p), Err(ControllerError::WeightSum(..))));
    }

    #[test]
    fn custom_registration() {
        let mut r = ControllerRegistry::empty();
        r.register("mine", |_| Ok(Box::new(Rhc)));
        assert!(r.contains("mine"));
        assert!(!r.contains("rhc"));
    }

    #[test]
    fn weight_parsing() {
        assert_eq!("nominal".parse::<Weight>().unwrap(), Weight::Nominal);
        assert_eq!("0.25".parse::<Weight>().unwrap(), Weight::Fixed(0.25));
        assert!("x".parse::<Weight>().is_err());
        let p: ControllerParams = serde_json::from_str(r#"{"alpha": 0.1, "beta": "nominal"}"#).unwrap();
        assert_eq!(p, ControllerParams { alpha: Weight::Fixed(0.1), beta: Weight::Nominal });
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"alpha":0.1,"beta":"nominal"}"#);
    }
}
