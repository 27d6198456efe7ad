//! Test support: random model generation and brute-force reference
//! semantics. Enabled with the `testing` feature.
//!
//! The oracle here reads the feature tree directly and never goes through
//! the clause encoding, so it can check the analyses independently.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fm::{
    AssetBinding, Configuration, ConstraintKind, FeatureId, FeatureModel, GroupKind, Layer, ModelBuilder, Variability,
};

/// Builds a random valid model with between 1 and `max_features` features.
pub fn random_model<R: Rng>(rng: &mut R, max_features: usize) -> FeatureModel {
    assert!(max_features >= 1);
    let target = rng.gen_range(1..=max_features);
    let letters = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    let mut next = 0usize;
    let mut fresh = |rng: &mut R| {
        next += 1;
        format!("{}{}", letters[rng.gen_range(0..letters.len())] as char, next)
    };

    let root = fresh(rng);
    let mut b = ModelBuilder::new("Random", &root).expect("valid names");
    let mut names = vec![root];
    while names.len() < target {
        let parent = names.choose(rng).expect("non-empty").clone();
        let room = target - names.len();
        if room >= 2 && rng.gen_bool(0.3) {
            let size = rng.gen_range(2..=room.min(4));
            let members: Vec<String> = (0..size).map(|_| fresh(rng)).collect();
            let refs: Vec<&str> = members.iter().map(String::as_str).collect();
            let kind = if rng.gen_bool(0.5) { GroupKind::Alternative } else { GroupKind::Or };
            let gname = format!("G{}", names.len());
            b.add_group(&parent, &gname, kind, &refs).expect("fresh members");
            names.extend(members);
        } else {
            let name = fresh(rng);
            let v = if rng.gen_bool(0.35) { Variability::Mandatory } else { Variability::Optional };
            b.add_feature(&parent, &name, v).expect("fresh name");
            names.push(name);
        }
    }
    for n in &names[1..] {
        if rng.gen_bool(0.3) {
            b.set_version(n, rng.gen_range(1..=4)).expect("known");
        }
    }
    for n in &names {
        if rng.gen_bool(0.4) {
            let layers: Vec<Layer> = Layer::ALL.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
            let layers = if layers.is_empty() { vec![Layer::Service] } else { layers };
            b.set_asset(n, AssetBinding::new(format!("mod-{}", n.to_lowercase()), layers)).expect("known");
        }
    }
    if names.len() >= 2 {
        for _ in 0..rng.gen_range(0..=3) {
            let pair: Vec<&String> = names.choose_multiple(rng, 2).collect();
            let kind = if rng.gen_bool(0.6) { ConstraintKind::Requires } else { ConstraintKind::Excludes };
            b.add_constraint(kind, pair[0], pair[1]).expect("distinct features");
        }
    }
    b.build().expect("generator keeps invariants")
}

/// The same model with a module bound to every feature that has none.
pub fn with_all_bindings(model: &FeatureModel) -> FeatureModel {
    let mut features = model.features().to_vec();
    for f in &mut features {
        if f.asset.is_none() {
            f.asset = Some(AssetBinding::full(format!("m-{}", f.name.to_lowercase())));
        }
    }
    crate::fm::model::rebuild(
        model.name().to_string(),
        features,
        model.groups().to_vec(),
        model.constraints().to_vec(),
    )
}

/// Random partial configuration over the model's features.
pub fn random_partial<R: Rng>(rng: &mut R, model: &FeatureModel) -> Configuration {
    let mut c = Configuration::default();
    let decide = rng.gen_range(0.0..0.5);
    for f in model.features() {
        if rng.gen_bool(decide) {
            if rng.gen_bool(0.5) {
                c.selected.insert(f.name.clone());
            } else {
                c.deselected.insert(f.name.clone());
            }
        }
    }
    c.with_total_for(model)
}

/// Direct evaluation of the model semantics on a selection.
pub fn satisfies(model: &FeatureModel, selected: &BTreeSet<FeatureId>) -> bool {
    let on = |id: FeatureId| selected.contains(&id);
    if !on(model.root()) {
        return false;
    }
    for f in model.features() {
        if let Some(p) = f.parent {
            if on(f.id) && !on(p) {
                return false;
            }
            if f.variability == Variability::Mandatory && on(p) && !on(f.id) {
                return false;
            }
        }
    }
    for g in model.groups() {
        let n = g.members.iter().filter(|&&m| on(m)).count();
        let ok = match g.kind {
            GroupKind::Or => !on(g.parent) || n >= 1,
            GroupKind::Alternative => n <= 1 && (!on(g.parent) || n == 1),
        };
        if !ok {
            return false;
        }
    }
    model.constraints().iter().all(|c| match c.kind {
        ConstraintKind::Requires => !on(c.from) || on(c.to),
        ConstraintKind::Excludes => !(on(c.from) && on(c.to)),
    })
}

/// Every valid product, found by trying all feature subsets.
pub fn brute_force_products(model: &FeatureModel) -> Vec<BTreeSet<FeatureId>> {
    let n = model.len();
    assert!(n <= 24, "brute force limited to small models");
    (0u32..(1u32 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(FeatureId).collect::<BTreeSet<_>>())
        .filter(|s| satisfies(model, s))
        .collect()
}

/// Products that agree with the decisions of `partial`.
pub fn brute_force_extensions(model: &FeatureModel, partial: &Configuration) -> Vec<BTreeSet<FeatureId>> {
    let sel = model.resolve(&partial.selected).expect("known features");
    let desel = model.resolve(&partial.deselected).expect("known features");
    brute_force_products(model)
        .into_iter()
        .filter(|p| sel.is_subset(p) && desel.is_disjoint(p))
        .collect()
}

/// Names of the features in `ids`, sorted.
pub fn names(model: &FeatureModel, ids: &BTreeSet<FeatureId>) -> Vec<String> {
    let mut v: Vec<String> = ids.iter().map(|&id| model.name_of(id).to_string()).collect();
    v.sort();
    v
}
