//! Damping laws for residual corrections during recursive forecasting.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// How much of the raw residual prediction survives at a forecast step.
pub trait DecayLaw: Send + Sync {
    fn name(&self) -> &'static str;

    /// Multiplier applied to the raw residual at 1-based `step`.
    fn weight(&self, step: usize, direct_days: usize, decay: f64) -> f64;

    fn correction(&self, raw_residual: f64, step: usize, direct_days: usize, decay: f64) -> f64 {
        raw_residual * self.weight(step, direct_days, decay)
    }
}

/// `decay^(step - direct_days)` after the direct window.
#[derive(Debug, Clone, Copy, Default)]
pub struct GeometricDecay;

impl DecayLaw for GeometricDecay {
    fn name(&self) -> &'static str {
        "geometric"
    }

    fn weight(&self, step: usize, direct_days: usize, decay: f64) -> f64 {
        if step <= direct_days {
            1.0
        } else {
            let exponent = i32::try_from(step - direct_days).unwrap_or(i32::MAX);
            decay.powi(exponent)
        }
    }
}

/// A single `decay` multiplier after the direct window.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlatDecay;

impl DecayLaw for FlatDecay {
    fn name(&self) -> &'static str {
        "flat"
    }

    fn weight(&self, step: usize, direct_days: usize, decay: f64) -> f64 {
        if step <= direct_days {
            1.0
        } else {
            decay
        }
    }
}

type DecayFactory = fn() -> Box<dyn DecayLaw>;

/// Decay laws selectable by name.
pub struct DecayRegistry {
    entries: BTreeMap<&'static str, DecayFactory>,
}

impl Default for DecayRegistry {
    fn default() -> Self {
        let mut registry = Self {
            entries: BTreeMap::new(),
        };
        registry.register("geometric", || Box::new(GeometricDecay));
        registry.register("flat", || Box::new(FlatDecay));
        registry
    }
}

impl DecayRegistry {
    pub fn register(&mut self, name: &'static str, factory: DecayFactory) {
        self.entries.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<Box<dyn DecayLaw>> {
        self.entries
            .get(name)
            .map(|factory| factory())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "decay law",
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }
}

/// Looks up a decay law in the default registry.
pub fn decay_law(name: &str) -> Result<Box<dyn DecayLaw>> {
    DecayRegistry::default().get(name)
}

/// Geometric correction: the raw residual for the first `direct_days`
/// steps, then `raw · decay^(step - direct_days)`.
pub fn decayed_correction(raw_residual: f64, step: usize, direct_days: usize, decay: f64) -> f64 {
    GeometricDecay.correction(raw_residual, step, direct_days, decay)
}
