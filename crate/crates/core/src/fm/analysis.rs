//! Decision propagation, product enumeration and model diagnostics.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{ConfigError, Configuration};
use super::encode::{encode, Clause};
use super::model::{FeatureId, FeatureModel, Variability};
use super::solver::{dpll, unit_propagate, Assignment, MaskSearch, EXACT_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model has {features} features; exact analysis is bounded at {bound}")]
    ExactBoundExceeded { features: usize, bound: usize },
}

/// Features decided as a consequence of a partial configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PropagationResult {
    pub forced_selected: BTreeSet<String>,
    pub forced_deselected: BTreeSet<String>,
    pub conflict: bool,
    pub open_features: BTreeSet<String>,
}

impl PropagationResult {
    fn conflict() -> Self {
        Self { conflict: true, ..Self::default() }
    }

    /// The input decisions extended with the forced ones.
    pub fn closure(&self, partial: &Configuration) -> Configuration {
        let mut c = partial.clone();
        c.selected.extend(self.forced_selected.iter().cloned());
        c.deselected.extend(self.forced_deselected.iter().cloned());
        c.total = !self.conflict && self.open_features.is_empty();
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelDiagnostics {
    pub void: bool,
    pub dead_features: BTreeSet<String>,
    pub core_features: BTreeSet<String>,
    pub false_optional: BTreeSet<String>,
    pub product_count: u64,
}

fn bit(id: FeatureId) -> u32 {
    1u32 << id.0
}

fn mask_of(ids: &BTreeSet<FeatureId>) -> u32 {
    ids.iter().fold(0, |m, &id| m | bit(id))
}

fn names_in_mask(model: &FeatureModel, mask: u32) -> BTreeSet<String> {
    model
        .features()
        .iter()
        .filter(|f| mask & bit(f.id) != 0)
        .map(|f| f.name.clone())
        .collect()
}

fn check_bound(model: &FeatureModel) -> Result<(), AnalysisError> {
    if model.len() > EXACT_BOUND {
        Err(AnalysisError::ExactBoundExceeded { features: model.len(), bound: EXACT_BOUND })
    } else {
        Ok(())
    }
}

/// Computes the features forced selected or deselected by `partial`.
///
/// Exact for models within [`EXACT_BOUND`]: a feature is forced iff it takes
/// the same value in every valid total extension. Larger models use unit
/// propagation, which never forces a wrong value but may leave forced
/// features open.
pub fn propagate(model: &FeatureModel, partial: &Configuration) -> Result<PropagationResult, ConfigError> {
    let (sel, desel) = partial.resolve(model)?;
    let clauses = encode(model);
    if model.len() <= EXACT_BOUND {
        Ok(propagate_exact(model, &clauses, &sel, &desel))
    } else {
        Ok(propagate_units(model, &clauses, &sel, &desel))
    }
}

fn propagate_exact(
    model: &FeatureModel,
    clauses: &[Clause],
    sel: &BTreeSet<FeatureId>,
    desel: &BTreeSet<FeatureId>,
) -> PropagationResult {
    let search = MaskSearch::new(model.len(), clauses);
    let all = search.all_mask();
    let (ft, ff) = (mask_of(sel), mask_of(desel));
    let Some(first) = search.find(ft, ff) else {
        return PropagationResult::conflict();
    };
    // Bits seen true / false in some valid extension.
    let mut seen_true = first;
    let mut seen_false = !first & all;
    let undecided = all & !ft & !ff;
    for var in 0..model.len() {
        let b = 1u32 << var;
        if undecided & b == 0 {
            continue;
        }
        if seen_true & b == 0 {
            if let Some(s) = search.find(ft | b, ff) {
                seen_true |= s;
                seen_false |= !s & all;
            }
        }
        if seen_false & b == 0 {
            if let Some(s) = search.find(ft, ff | b) {
                seen_true |= s;
                seen_false |= !s & all;
            }
        }
    }
    PropagationResult {
        forced_selected: names_in_mask(model, undecided & !seen_false),
        forced_deselected: names_in_mask(model, undecided & !seen_true),
        conflict: false,
        open_features: names_in_mask(model, undecided & seen_true & seen_false),
    }
}

fn initial_assignment(model: &FeatureModel, sel: &BTreeSet<FeatureId>, desel: &BTreeSet<FeatureId>) -> Assignment {
    let mut a = vec![None; model.len()];
    for id in sel {
        a[id.0] = Some(true);
    }
    for id in desel {
        a[id.0] = Some(false);
    }
    a
}

fn propagate_units(
    model: &FeatureModel,
    clauses: &[Clause],
    sel: &BTreeSet<FeatureId>,
    desel: &BTreeSet<FeatureId>,
) -> PropagationResult {
    let start = initial_assignment(model, sel, desel);
    let Some(end) = unit_propagate(clauses, start.clone()) else {
        return PropagationResult::conflict();
    };
    let mut result = PropagationResult::default();
    for f in model.features() {
        match (start[f.id.0], end[f.id.0]) {
            (Some(_), _) => {}
            (None, Some(true)) => {
                result.forced_selected.insert(f.name.clone());
            }
            (None, Some(false)) => {
                result.forced_deselected.insert(f.name.clone());
            }
            (None, None) => {
                result.open_features.insert(f.name.clone());
            }
        }
    }
    result
}

/// Number of valid total configurations.
pub fn count(model: &FeatureModel) -> Result<u64, AnalysisError> {
    count_extensions(model, &Configuration::default())
}

/// Number of valid total configurations that agree with `partial`.
pub fn count_extensions(model: &FeatureModel, partial: &Configuration) -> Result<u64, AnalysisError> {
    check_bound(model)?;
    let (sel, desel) = partial.resolve(model)?;
    let search = MaskSearch::new(model.len(), &encode(model));
    Ok(search.count(mask_of(&sel), mask_of(&desel)))
}

/// Lists valid total configurations in lexicographic order of their sorted
/// selected-name sequences. `limit = None` means all of them, which is only
/// allowed within [`EXACT_BOUND`].
pub fn enumerate(model: &FeatureModel, limit: Option<usize>) -> Result<Vec<Configuration>, AnalysisError> {
    match limit {
        None => {
            check_bound(model)?;
            Ok(enumerate_exact(model, usize::MAX))
        }
        Some(k) if model.len() <= EXACT_BOUND => Ok(enumerate_exact(model, k)),
        Some(k) => Ok(enumerate_lex(model, k)),
    }
}

fn enumerate_exact(model: &FeatureModel, limit: usize) -> Vec<Configuration> {
    let search = MaskSearch::new(model.len(), &encode(model));
    let mut products: Vec<Vec<&str>> = Vec::new();
    let _ = search.for_each(0, 0, |mask| {
        let mut names: Vec<&str> = model
            .features()
            .iter()
            .filter(|f| mask & bit(f.id) != 0)
            .map(|f| f.name.as_str())
            .collect();
        names.sort_unstable();
        products.push(names);
        ControlFlow::Continue(())
    });
    products.sort();
    products.truncate(limit);
    products.into_iter().map(|names| total_config(model, &names)).collect()
}

fn total_config(model: &FeatureModel, selected: &[&str]) -> Configuration {
    let selected: BTreeSet<String> = selected.iter().map(|s| s.to_string()).collect();
    let deselected = model
        .features()
        .iter()
        .filter(|f| !selected.contains(&f.name))
        .map(|f| f.name.clone())
        .collect();
    Configuration { selected, deselected, total: true }
}

/// Generates products directly in lexicographic order without materializing
/// all of them. Features are decided in name order; at each level the
/// "nothing more selected" product sorts first, then products including the
/// next feature, then the ones excluding it.
pub(crate) fn enumerate_lex(model: &FeatureModel, limit: usize) -> Vec<Configuration> {
    let clauses = encode(model);
    let mut order: Vec<FeatureId> = model.features().iter().map(|f| f.id).collect();
    order.sort_by(|a, b| model.name_of(*a).cmp(model.name_of(*b)));

    struct Lex<'a> {
        model: &'a FeatureModel,
        clauses: Vec<Clause>,
        order: Vec<FeatureId>,
        limit: usize,
        out: Vec<Configuration>,
    }

    impl Lex<'_> {
        fn emit(&mut self, assignment: &[Option<bool>]) {
            let mut names: Vec<&str> = self
                .order
                .iter()
                .filter(|id| assignment[id.0] == Some(true))
                .map(|&id| self.model.name_of(id))
                .collect();
            names.sort_unstable();
            self.out.push(total_config(self.model, &names));
        }

        fn walk(&mut self, level: usize, assignment: Assignment, skip_rest_false: bool) {
            if self.out.len() >= self.limit {
                return;
            }
            if !skip_rest_false {
                let mut rest_false = assignment.clone();
                for id in &self.order[level..] {
                    if rest_false[id.0].is_none() {
                        rest_false[id.0] = Some(false);
                    }
                }
                let consistent = self.order[level..].iter().all(|id| assignment[id.0] != Some(true));
                if consistent && unit_propagate(&self.clauses, rest_false.clone()).is_some() {
                    self.emit(&rest_false);
                    if self.out.len() >= self.limit {
                        return;
                    }
                }
            }
            if level == self.order.len() {
                return;
            }
            let var = self.order[level];
            for choice in [true, false] {
                if assignment[var.0] == Some(!choice) {
                    continue;
                }
                let mut next = assignment.clone();
                next[var.0] = Some(choice);
                let Some(propagated) = unit_propagate(&self.clauses, next) else { continue };
                if dpll(&self.clauses, propagated.clone()).is_none() {
                    continue;
                }
                // Excluding the feature: the all-false remainder equals the
                // product already emitted at this level.
                self.walk(level + 1, propagated, !choice);
                if self.out.len() >= self.limit {
                    return;
                }
            }
        }
    }

    let mut lex = Lex { model, clauses, order, limit, out: Vec::new() };
    lex.walk(0, vec![None; model.len()], false);
    lex.out
}

/// Core, dead and false-optional features plus the product count.
pub fn diagnostics(model: &FeatureModel) -> Result<ModelDiagnostics, AnalysisError> {
    check_bound(model)?;
    let search = MaskSearch::new(model.len(), &encode(model));
    let all = search.all_mask();
    let (mut and, mut or, mut n) = (all, 0u32, 0u64);
    let _ = search.for_each(0, 0, |m| {
        and &= m;
        or |= m;
        n += 1;
        ControlFlow::Continue(())
    });
    if n == 0 {
        return Ok(ModelDiagnostics {
            void: true,
            dead_features: names_in_mask(model, all),
            core_features: BTreeSet::new(),
            false_optional: BTreeSet::new(),
            product_count: 0,
        });
    }
    let optional: u32 = model
        .features()
        .iter()
        .filter(|f| f.variability == Variability::Optional)
        .fold(0, |m, f| m | bit(f.id));
    Ok(ModelDiagnostics {
        void: false,
        dead_features: names_in_mask(model, all & !or),
        core_features: names_in_mask(model, and),
        false_optional: names_in_mask(model, and & optional),
        product_count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fm::model::{ConstraintKind, GroupKind, ModelBuilder};

    fn root_only() -> FeatureModel {
        ModelBuilder::new("M", "Root").unwrap().build().unwrap()
    }

    #[test]
    fn root_only_model() {
        let m = root_only();
        assert_eq!(count(&m).unwrap(), 1);
        let products = enumerate(&m, None).unwrap();
        assert_eq!(products.len(), 1);
        assert_eq!(products[0].selected, BTreeSet::from(["Root".to_string()]));
        let p = propagate(&m, &Configuration::default()).unwrap();
        assert_eq!(p.forced_selected, BTreeSet::from(["Root".to_string()]));
        assert!(p.open_features.is_empty());
    }

    #[test]
    fn optional_child_gives_two_products() {
        let mut b = ModelBuilder::new("M", "R").unwrap();
        b.add_feature("R", "C", Variability::Optional).unwrap();
        let m = b.build().unwrap();
        assert_eq!(enumerate(&m, None).unwrap().len(), 2);
        let d = diagnostics(&m).unwrap();
        assert_eq!(d.core_features, BTreeSet::from(["R".to_string()]));
        assert!(d.false_optional.is_empty());
        assert!(d.dead_features.is_empty());
    }

    #[test]
    fn mandatory_child_always_present() {
        let mut b = ModelBuilder::new("M", "R").unwrap();
        b.add_feature("R", "C", Variability::Mandatory).unwrap();
        let m = b.build().unwrap();
        for p in enumerate(&m, None).unwrap() {
            assert!(p.selected.contains("C"));
        }
    }

    #[test]
    fn alternative_of_three_counts_three() {
        let mut b = ModelBuilder::new("M", "R").unwrap();
        b.add_group("R", "G", GroupKind::Alternative, &["A", "B", "C"]).unwrap();
        assert_eq!(count(&b.build().unwrap()).unwrap(), 3);
    }

    #[test]
    fn excluding_mandatory_child_voids_model() {
        let mut b = ModelBuilder::new("M", "R").unwrap();
        b.add_feature("R", "C", Variability::Mandatory).unwrap();
        b.add_constraint(ConstraintKind::Excludes, "R", "C").unwrap();
        let d = diagnostics(&b.build().unwrap()).unwrap();
        assert!(d.void);
        assert_eq!(d.product_count, 0);
    }

    #[test]
    fn false_optional_reported() {
        let mut b = ModelBuilder::new("M", "R").unwrap();
        b.add_feature("R", "A", Variability::Mandatory).unwrap();
        b.add_feature("R", "B", Variability::Optional).unwrap();
        b.add_constraint(ConstraintKind::Requires, "A", "B").unwrap();
        let d = diagnostics(&b.build().unwrap()).unwrap();
        assert_eq!(d.false_optional, BTreeSet::from(["B".to_string()]));
    }

    #[test]
    fn deselecting_root_conflicts() {
        let m = root_only();
        let p = propagate(&m, &Configuration::new(Vec::<String>::new(), ["Root"])).unwrap();
        assert!(p.conflict);
        assert!(p.forced_selected.is_empty() && p.forced_deselected.is_empty() && p.open_features.is_empty());
    }

    #[test]
    fn unknown_and_contradictory_decisions_rejected() {
        let m = root_only();
        assert_eq!(
            propagate(&m, &Configuration::new(["Ghost"], Vec::<String>::new())),
            Err(ConfigError::UnknownFeature("Ghost".into()))
        );
        assert_eq!(
            propagate(&m, &Configuration::new(["Root"], ["Root"])),
            Err(ConfigError::Contradictory("Root".into()))
        );
    }

    #[test]
    fn exact_bound_enforced() {
        let mut b = ModelBuilder::new("M", "R").unwrap();
        for i in 0..EXACT_BOUND {
            b.add_feature("R", &format!("F{i}"), Variability::Optional).unwrap();
        }
        let m = b.build().unwrap();
        assert!(matches!(count(&m), Err(AnalysisError::ExactBoundExceeded { features: 25, .. })));
        assert!(matches!(enumerate(&m, None), Err(AnalysisError::ExactBoundExceeded { .. })));
        assert!(diagnostics(&m).is_err());
        // A bounded enumeration still works beyond the bound; with every
        // feature optional the smallest name sequence selects everything.
        let first = enumerate(&m, Some(2)).unwrap();
        assert_eq!(first.len(), 2);
        assert_eq!(first[0].selected.len(), 25);
        assert!(first[0].selected < first[1].selected);
    }

    #[test]
    fn lex_generator_matches_sorted_enumeration() {
        let mut b = ModelBuilder::new("M", "R").unwrap();
        b.add_feature("R", "Zed", Variability::Optional).unwrap();
        b.add_feature("R", "Alpha", Variability::Optional).unwrap();
        b.add_group("Alpha", "G", GroupKind::Alternative, &["Gx", "Ga"]).unwrap();
        b.add_group("R", "H", GroupKind::Or, &["Hb", "Hc"]).unwrap();
        b.add_constraint(ConstraintKind::Requires, "Hc", "Zed").unwrap();
        let m = b.build().unwrap();
        let exact = enumerate_exact(&m, usize::MAX);
        assert_eq!(enumerate_lex(&m, usize::MAX), exact);
        assert_eq!(enumerate_lex(&m, 4), exact[..4].to_vec());
    }
}
