use thiserror::Error;

use super::model::{rebuild, CrossTreeConstraint, Feature, FeatureId, FeatureModel, Group, Variability};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VersionError {
    #[error("versions start at 1")]
    InvalidVersion,
    #[error("root feature `{name}` was introduced in version {introduced}, after {requested}")]
    RootRemoved { name: String, introduced: u32, requested: u32 },
}

/// Restricts the model to the features available in `version`.
///
/// A feature survives when it was introduced at or before `version` and its
/// parent survives. Groups keep their surviving members; a group left with
/// fewer than two members is dissolved and its survivors become optional.
/// Constraints touching a removed feature are dropped.
pub fn filter_by_version(model: &FeatureModel, version: u32) -> Result<FeatureModel, VersionError> {
    if version == 0 {
        return Err(VersionError::InvalidVersion);
    }
    let root = model.feature(model.root());
    if root.version > version {
        return Err(VersionError::RootRemoved {
            name: root.name.clone(),
            introduced: root.version,
            requested: version,
        });
    }
    // Ids are preorder, so a parent's fate is known before its children.
    let mut remap: Vec<Option<FeatureId>> = vec![None; model.len()];
    let mut kept = 0;
    for f in model.features() {
        let parent_alive = f.parent.is_none_or(|p| remap[p.0].is_some());
        if parent_alive && f.version <= version {
            remap[f.id.0] = Some(FeatureId(kept));
            kept += 1;
        }
    }
    let map = |id: FeatureId| remap[id.0];

    let mut features: Vec<Feature> = model
        .features()
        .iter()
        .filter_map(|f| {
            Some(Feature {
                id: map(f.id)?,
                name: f.name.clone(),
                parent: f.parent.and_then(map),
                variability: f.variability,
                version: f.version,
                asset: f.asset.clone(),
                children: f.children.iter().filter_map(|&c| map(c)).collect(),
            })
        })
        .collect();

    let mut groups = Vec::new();
    for g in model.groups() {
        let Some(parent) = map(g.parent) else { continue };
        let members: Vec<FeatureId> = g.members.iter().filter_map(|&m| map(m)).collect();
        if members.len() >= 2 {
            groups.push(Group { name: g.name.clone(), parent, kind: g.kind, members });
        } else {
            for m in members {
                features[m.0].variability = Variability::Optional;
            }
        }
    }

    let constraints = model
        .constraints()
        .iter()
        .filter_map(|c| {
            Some(CrossTreeConstraint { kind: c.kind, from: map(c.from)?, to: map(c.to)? })
        })
        .collect();

    Ok(rebuild(model.name().to_string(), features, groups, constraints))
}
