//! Boolean encoding of feature-model semantics and configuration checking.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::config::{Configuration, ConfigError};
use super::model::{ConstraintKind, FeatureId, FeatureModel, GroupKind, Variability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub feature: FeatureId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(feature: FeatureId) -> Self {
        Self { feature, positive: true }
    }

    pub fn neg(feature: FeatureId) -> Self {
        Self { feature, positive: false }
    }

    pub fn holds(self, selected: &BTreeSet<FeatureId>) -> bool {
        selected.contains(&self.feature) == self.positive
    }
}

/// The model rule a clause came from. Declaration order is the sort order
/// used when reporting violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClauseKind {
    Root,
    MandatoryChild,
    ChildRequiresParent,
    OrGroup,
    AlternativeAtLeastOne,
    AlternativeAtMostOne,
    Requires,
    Excludes,
}

impl ClauseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClauseKind::Root => "root",
            ClauseKind::MandatoryChild => "mandatory-child",
            ClauseKind::ChildRequiresParent => "child-requires-parent",
            ClauseKind::OrGroup => "or-group",
            ClauseKind::AlternativeAtLeastOne => "alternative-at-least-one",
            ClauseKind::AlternativeAtMostOne => "alternative-at-most-one",
            ClauseKind::Requires => "requires",
            ClauseKind::Excludes => "excludes",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ClauseKind::Root => "Root feature must be selected",
            ClauseKind::MandatoryChild => "Mandatory child of selected parent",
            ClauseKind::ChildRequiresParent => "Child selected without its parent",
            ClauseKind::OrGroup => "Or group needs at least one member",
            ClauseKind::AlternativeAtLeastOne => "Alternative group needs exactly one member",
            ClauseKind::AlternativeAtMostOne => "Alternative group allows at most one member",
            ClauseKind::Requires => "Required feature missing",
            ClauseKind::Excludes => "Mutually exclusive features selected",
        }
    }
}

/// A disjunction of literals together with the features it talks about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub kind: ClauseKind,
    pub literals: Vec<Literal>,
    /// Features named in the originating rule; the first is the subject.
    pub involved: Vec<FeatureId>,
}

impl Clause {
    pub fn satisfied_by(&self, selected: &BTreeSet<FeatureId>) -> bool {
        self.literals.iter().any(|l| l.holds(selected))
    }
}

pub type ConstraintSet = Vec<Clause>;

/// Translates the model into clauses over feature literals.
pub fn encode(model: &FeatureModel) -> ConstraintSet {
    let mut clauses = vec![Clause {
        kind: ClauseKind::Root,
        literals: vec![Literal::pos(model.root())],
        involved: vec![model.root()],
    }];
    for f in model.features() {
        let Some(parent) = f.parent else { continue };
        clauses.push(Clause {
            kind: ClauseKind::ChildRequiresParent,
            literals: vec![Literal::neg(f.id), Literal::pos(parent)],
            involved: vec![f.id, parent],
        });
        if f.variability == Variability::Mandatory {
            clauses.push(Clause {
                kind: ClauseKind::MandatoryChild,
                literals: vec![Literal::neg(parent), Literal::pos(f.id)],
                involved: vec![f.id, parent],
            });
        }
    }
    for g in model.groups() {
        let mut at_least_one = vec![Literal::neg(g.parent)];
        at_least_one.extend(g.members.iter().map(|&m| Literal::pos(m)));
        let mut involved = vec![g.parent];
        involved.extend(&g.members);
        match g.kind {
            GroupKind::Or => clauses.push(Clause {
                kind: ClauseKind::OrGroup,
                literals: at_least_one,
                involved,
            }),
            GroupKind::Alternative => {
                clauses.push(Clause {
                    kind: ClauseKind::AlternativeAtLeastOne,
                    literals: at_least_one,
                    involved,
                });
                for (i, &a) in g.members.iter().enumerate() {
                    for &b in &g.members[i + 1..] {
                        clauses.push(Clause {
                            kind: ClauseKind::AlternativeAtMostOne,
                            literals: vec![Literal::neg(a), Literal::neg(b)],
                            involved: vec![a, b],
                        });
                    }
                }
            }
        }
    }
    for c in model.constraints() {
        let (kind, literals) = match c.kind {
            ConstraintKind::Requires => (ClauseKind::Requires, vec![Literal::neg(c.from), Literal::pos(c.to)]),
            ConstraintKind::Excludes => (ClauseKind::Excludes, vec![Literal::neg(c.from), Literal::neg(c.to)]),
        };
        clauses.push(Clause { kind, literals, involved: vec![c.from, c.to] });
    }
    clauses
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub kind: ClauseKind,
    pub features: Vec<String>,
}

impl Violation {
    pub fn message(&self) -> &'static str {
        self.kind.describe()
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.kind.as_str(), self.features.join(" "), self.message())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationResult {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Checks a total configuration against every clause of the model.
pub fn validate(model: &FeatureModel, config: &Configuration) -> Result<ValidationResult, ConfigError> {
    let (selected, _) = config.resolve(model)?;
    if !config.is_total_for(model) {
        let undecided = config.undecided(model);
        return Err(ConfigError::NotTotal(undecided));
    }
    Ok(check_selection(model, &selected))
}

/// Evaluates `selected` (everything else deselected) against the model.
pub fn check_selection(model: &FeatureModel, selected: &BTreeSet<FeatureId>) -> ValidationResult {
    let mut violations: Vec<Violation> = encode(model)
        .iter()
        .filter(|c| !c.satisfied_by(selected))
        .map(|c| Violation {
            kind: c.kind,
            features: c.involved.iter().map(|&id| model.name_of(id).to_string()).collect(),
        })
        .collect();
    violations.sort();
    ValidationResult { valid: violations.is_empty(), violations }
}
