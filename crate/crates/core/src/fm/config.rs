use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{FeatureId, FeatureModel, ModelError};

/// Explicit feature decisions, keyed by feature name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub selected: BTreeSet<String>,
    pub deselected: BTreeSet<String>,
    /// Whether every feature of the model the configuration was read against
    /// is decided. Recomputed by [`Configuration::with_total_for`].
    #[serde(default)]
    pub total: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` is both selected and deselected")]
    Contradictory(String),
    #[error("configuration is not total; undecided: {}", .0.join(", "))]
    NotTotal(Vec<String>),
}

impl From<ModelError> for ConfigError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownFeature(n) => ConfigError::UnknownFeature(n),
            other => ConfigError::UnknownFeature(other.to_string()),
        }
    }
}

impl Configuration {
    pub fn new<S, D>(selected: S, deselected: D) -> Self
    where
        S: IntoIterator,
        S::Item: Into<String>,
        D: IntoIterator,
        D::Item: Into<String>,
    {
        Self {
            selected: selected.into_iter().map(Into::into).collect(),
            deselected: deselected.into_iter().map(Into::into).collect(),
            total: false,
        }
    }

    /// Total configuration selecting exactly `selected` in `model`.
    pub fn total_from_ids(model: &FeatureModel, selected: &BTreeSet<FeatureId>) -> Self {
        let mut c = Configuration::default();
        for f in model.features() {
            if selected.contains(&f.id) {
                c.selected.insert(f.name.clone());
            } else {
                c.deselected.insert(f.name.clone());
            }
        }
        c.total = true;
        c
    }

    pub fn with_total_for(mut self, model: &FeatureModel) -> Self {
        self.total = self.is_total_for(model);
        self
    }

    pub fn is_total_for(&self, model: &FeatureModel) -> bool {
        model
            .features()
            .iter()
            .all(|f| self.selected.contains(&f.name) || self.deselected.contains(&f.name))
    }

    /// Model features without a decision, sorted by name.
    pub fn undecided(&self, model: &FeatureModel) -> Vec<String> {
        model
            .sorted_names()
            .into_iter()
            .filter(|n| !self.selected.contains(*n) && !self.deselected.contains(*n))
            .map(str::to_string)
            .collect()
    }

    /// Resolves names to ids, rejecting unknown and contradictory decisions.
    pub fn resolve(&self, model: &FeatureModel) -> Result<(BTreeSet<FeatureId>, BTreeSet<FeatureId>), ConfigError> {
        if let Some(n) = self.selected.intersection(&self.deselected).next() {
            return Err(ConfigError::Contradictory(n.clone()));
        }
        Ok((model.resolve(&self.selected)?, model.resolve(&self.deselected)?))
    }
}
