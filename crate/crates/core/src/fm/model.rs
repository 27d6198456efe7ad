//! Feature model types and the checked builder that produces them.
//!
//! A [`FeatureModel`] is immutable once built. Feature ids are dense indices
//! assigned in depth-first preorder over the declared child order, so a parent
//! always has a smaller id than its children.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense index of a feature inside its model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeatureId(pub usize);

impl FeatureId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variability {
    Mandatory,
    Optional,
    GroupMember,
}

/// Architectural layer a module contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Layer {
    #[serde(rename = "XHTML")]
    Xhtml,
    Controller,
    Service,
    #[serde(rename = "DAO")]
    Dao,
}

impl Layer {
    pub const ALL: [Layer; 4] = [Layer::Xhtml, Layer::Controller, Layer::Service, Layer::Dao];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Xhtml => "XHTML",
            Layer::Controller => "Controller",
            Layer::Service => "Service",
            Layer::Dao => "DAO",
        }
    }

    pub fn parse(s: &str) -> Option<Layer> {
        Layer::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Binds a feature to the build module that implements it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AssetBinding {
    pub module_id: String,
    pub layers: BTreeSet<Layer>,
}

impl AssetBinding {
    pub fn new(module_id: impl Into<String>, layers: impl IntoIterator<Item = Layer>) -> Self {
        Self {
            module_id: module_id.into(),
            layers: layers.into_iter().collect(),
        }
    }

    /// Binding covering every layer.
    pub fn full(module_id: impl Into<String>) -> Self {
        Self::new(module_id, Layer::ALL)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub id: FeatureId,
    pub name: String,
    pub parent: Option<FeatureId>,
    pub variability: Variability,
    /// Release that introduced the feature.
    pub version: u32,
    pub asset: Option<AssetBinding>,
    /// Children in declaration order. Members of one group are contiguous.
    pub children: Vec<FeatureId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    Alternative,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub name: String,
    pub parent: FeatureId,
    pub kind: GroupKind,
    pub members: Vec<FeatureId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintKind {
    Requires,
    Excludes,
}

impl ConstraintKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::Requires => "requires",
            ConstraintKind::Excludes => "excludes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrossTreeConstraint {
    pub kind: ConstraintKind,
    pub from: FeatureId,
    pub to: FeatureId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
    #[error("duplicate feature `{0}`")]
    DuplicateFeature(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("group `{group}` needs at least two distinct members")]
    GroupTooSmall { group: String },
    #[error("group members are declared with the group, `{0}` cannot be added as a plain child")]
    GroupMemberVariability(String),
    #[error("constraint on `{0}` references the feature itself")]
    SelfReference(String),
    #[error("feature `{feature}` has version {version}; versions start at 1")]
    InvalidVersion { feature: String, version: u32 },
    #[error("feature `{0}` has an asset binding with an empty module id")]
    EmptyModuleId(String),
    #[error("feature `{0}` has an asset binding without layers")]
    EmptyLayers(String),
}

/// A rooted feature tree with groups and cross-tree constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureModel {
    name: String,
    features: Vec<Feature>,
    root: FeatureId,
    groups: Vec<Group>,
    /// Sorted by (kind, from name, to name), deduplicated.
    constraints: Vec<CrossTreeConstraint>,
}

impl FeatureModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> FeatureId {
        self.root
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, id: FeatureId) -> &Feature {
        &self.features[id.0]
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn constraints(&self) -> &[CrossTreeConstraint] {
        &self.constraints
    }

    pub fn name_of(&self, id: FeatureId) -> &str {
        &self.features[id.0].name
    }

    pub fn find(&self, name: &str) -> Option<FeatureId> {
        self.features.iter().find(|f| f.name == name).map(|f| f.id)
    }

    /// Group that `id` is a member of, if any.
    pub fn group_of(&self, id: FeatureId) -> Option<&Group> {
        self.groups.iter().find(|g| g.members.contains(&id))
    }

    pub fn max_version(&self) -> u32 {
        self.features.iter().map(|f| f.version).max().unwrap_or(1)
    }

    /// All feature names, sorted.
    pub fn sorted_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.features.iter().map(|f| f.name.as_str()).collect();
        names.sort_unstable();
        names
    }

    /// Returns the feature ids of `names`, failing on the first unknown name.
    pub fn resolve<'a, I>(&self, names: I) -> Result<BTreeSet<FeatureId>, ModelError>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let index: HashMap<&str, FeatureId> =
            self.features.iter().map(|f| (f.name.as_str(), f.id)).collect();
        names
            .into_iter()
            .map(|n| index.get(n.as_str()).copied().ok_or_else(|| ModelError::UnknownFeature(n.clone())))
            .collect()
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Incrementally assembles a [`FeatureModel`], rejecting anything that would
/// break the model invariants at the point it is added.
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    name: String,
    features: Vec<Feature>,
    index: HashMap<String, FeatureId>,
    groups: Vec<Group>,
    constraints: Vec<CrossTreeConstraint>,
}

impl ModelBuilder {
    pub fn new(model_name: &str, root_name: &str) -> Result<Self, ModelError> {
        for n in [model_name, root_name] {
            if !is_identifier(n) {
                return Err(ModelError::InvalidName(n.to_string()));
            }
        }
        let root = Feature {
            id: FeatureId(0),
            name: root_name.to_string(),
            parent: None,
            variability: Variability::Mandatory,
            version: 1,
            asset: None,
            children: Vec::new(),
        };
        Ok(Self {
            name: model_name.to_string(),
            index: HashMap::from([(root_name.to_string(), FeatureId(0))]),
            features: vec![root],
            groups: Vec::new(),
            constraints: Vec::new(),
        })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn id(&self, name: &str) -> Result<FeatureId, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownFeature(name.to_string()))
    }

    fn push_child(&mut self, parent: FeatureId, name: &str, variability: Variability) -> Result<FeatureId, ModelError> {
        if !is_identifier(name) {
            return Err(ModelError::InvalidName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(ModelError::DuplicateFeature(name.to_string()));
        }
        let id = FeatureId(self.features.len());
        self.features.push(Feature {
            id,
            name: name.to_string(),
            parent: Some(parent),
            variability,
            version: 1,
            asset: None,
            children: Vec::new(),
        });
        self.features[parent.0].children.push(id);
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    /// Adds a mandatory or optional child of `parent`.
    pub fn add_feature(&mut self, parent: &str, name: &str, variability: Variability) -> Result<FeatureId, ModelError> {
        if variability == Variability::GroupMember {
            return Err(ModelError::GroupMemberVariability(name.to_string()));
        }
        let parent = self.id(parent)?;
        self.push_child(parent, name, variability)
    }

    /// Adds a group under `parent` and creates its member features.
    pub fn add_group(&mut self, parent: &str, name: &str, kind: GroupKind, members: &[&str]) -> Result<(), ModelError> {
        let parent = self.id(parent)?;
        let distinct: BTreeSet<&&str> = members.iter().collect();
        if members.len() < 2 || distinct.len() != members.len() {
            return Err(ModelError::GroupTooSmall { group: name.to_string() });
        }
        if let Some(m) = members.iter().find(|m| self.index.contains_key(**m)) {
            return Err(ModelError::DuplicateFeature(m.to_string()));
        }
        if !is_identifier(name) {
            return Err(ModelError::InvalidName(name.to_string()));
        }
        let ids = members
            .iter()
            .map(|m| self.push_child(parent, m, Variability::GroupMember))
            .collect::<Result<Vec<_>, _>>()?;
        self.groups.push(Group {
            name: name.to_string(),
            parent,
            kind,
            members: ids,
        });
        Ok(())
    }

    pub fn set_version(&mut self, feature: &str, version: u32) -> Result<(), ModelError> {
        if version == 0 {
            return Err(ModelError::InvalidVersion { feature: feature.to_string(), version });
        }
        let id = self.id(feature)?;
        self.features[id.0].version = version;
        Ok(())
    }

    pub fn set_asset(&mut self, feature: &str, asset: AssetBinding) -> Result<(), ModelError> {
        if asset.module_id.is_empty() {
            return Err(ModelError::EmptyModuleId(feature.to_string()));
        }
        if asset.layers.is_empty() {
            return Err(ModelError::EmptyLayers(feature.to_string()));
        }
        let id = self.id(feature)?;
        self.features[id.0].asset = Some(asset);
        Ok(())
    }

    pub fn add_constraint(&mut self, kind: ConstraintKind, from: &str, to: &str) -> Result<(), ModelError> {
        let from_id = self.id(from)?;
        let to_id = self.id(to)?;
        if from_id == to_id {
            return Err(ModelError::SelfReference(from.to_string()));
        }
        self.constraints.push(CrossTreeConstraint { kind, from: from_id, to: to_id });
        Ok(())
    }

    /// Finalizes the model: renumbers features in preorder and canonicalizes
    /// the group and constraint lists.
    pub fn build(self) -> Result<FeatureModel, ModelError> {
        let mut order = Vec::with_capacity(self.features.len());
        let mut stack = vec![FeatureId(0)];
        while let Some(id) = stack.pop() {
            order.push(id);
            stack.extend(self.features[id.0].children.iter().rev().copied());
        }
        let mut remap = vec![FeatureId(0); self.features.len()];
        for (new, old) in order.iter().enumerate() {
            remap[old.0] = FeatureId(new);
        }
        let features: Vec<Feature> = order
            .iter()
            .map(|old| {
                let f = &self.features[old.0];
                Feature {
                    id: remap[old.0],
                    name: f.name.clone(),
                    parent: f.parent.map(|p| remap[p.0]),
                    variability: f.variability,
                    version: f.version,
                    asset: f.asset.clone(),
                    children: f.children.iter().map(|c| remap[c.0]).collect(),
                }
            })
            .collect();
        let mut groups: Vec<Group> = self
            .groups
            .iter()
            .map(|g| Group {
                name: g.name.clone(),
                parent: remap[g.parent.0],
                kind: g.kind,
                members: g.members.iter().map(|m| remap[m.0]).collect(),
            })
            .collect();
        groups.sort_by_key(|g| g.members.iter().min().copied());
        let mut constraints: Vec<CrossTreeConstraint> = self
            .constraints
            .iter()
            .map(|c| CrossTreeConstraint { kind: c.kind, from: remap[c.from.0], to: remap[c.to.0] })
            .collect();
        constraints.sort_by(|a, b| {
            (a.kind, &features[a.from.0].name, &features[a.to.0].name)
                .cmp(&(b.kind, &features[b.from.0].name, &features[b.to.0].name))
        });
        constraints.dedup();
        Ok(FeatureModel {
            name: self.name,
            features,
            root: FeatureId(0),
            groups,
            constraints,
        })
    }
}

/// Low-level constructor for derived models (version filtering). The caller
/// guarantees the parts already satisfy the model invariants.
pub(crate) fn rebuild(
    name: String,
    features: Vec<Feature>,
    groups: Vec<Group>,
    constraints: Vec<CrossTreeConstraint>,
) -> FeatureModel {
    let b = ModelBuilder {
        name,
        index: features.iter().map(|f| (f.name.clone(), f.id)).collect(),
        features,
        groups,
        constraints,
    };
    b.build().expect("derived model keeps invariants")
}
