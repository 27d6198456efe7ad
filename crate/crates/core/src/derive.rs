//! Product derivation: from a valid configuration to a manifest listing the
//! product's modules in build order.
//!
//! Module dependencies come from the feature tree (a child module depends on
//! its parent's module) and from `requires` constraints between selected
//! features. `excludes` constraints restrict selection only and add no edge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::fm::{
    check_selection, filter_by_version, ConfigError, Configuration, ConstraintKind, FeatureModel, Layer, Violation,
    VersionError,
};
use crate::graph::DiGraph;

/// Parent feature whose group members are language resources.
pub const LANGUAGE_PARENT: &str = "Internationalization";

pub type ModuleGraph = DiGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleEntry {
    pub module_id: String,
    pub layers: BTreeSet<Layer>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductManifest {
    pub product_name: String,
    pub model_name: String,
    pub version: u32,
    /// Selected features, sorted.
    pub features: Vec<String>,
    /// Dependencies before dependents; name order when cyclic.
    pub modules: Vec<ModuleEntry>,
    pub languages: Vec<String>,
    pub cycle_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Version(#[from] VersionError),
    #[error("feature `{feature}` is not available in version {version}")]
    NotInVersion { feature: String, version: u32 },
    #[error("invalid configuration: {}", format_violations(.0))]
    InvalidConfiguration(Vec<Violation>),
    #[error("selected feature `{0}` has no module binding")]
    MissingBinding(String),
    #[error("module graph has {} cycle(s)", .manifest.cycle_count)]
    Cycle { manifest: Box<ProductManifest>, cycles: Vec<Vec<String>> },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn ensure_valid(model: &FeatureModel, config: &Configuration) -> Result<BTreeSet<crate::fm::FeatureId>, DeriveError> {
    let (selected, _) = config.resolve(model)?;
    if !config.is_total_for(model) {
        return Err(ConfigError::NotTotal(config.undecided(model)).into());
    }
    let result = check_selection(model, &selected);
    if !result.valid {
        return Err(DeriveError::InvalidConfiguration(result.violations));
    }
    Ok(selected)
}

/// Module nodes of the selected features and their dependency edges.
pub fn build_module_graph(model: &FeatureModel, config: &Configuration) -> Result<ModuleGraph, DeriveError> {
    let selected = ensure_valid(model, config)?;
    let module_of = |id: crate::fm::FeatureId| -> Result<&str, DeriveError> {
        let f = model.feature(id);
        f.asset
            .as_ref()
            .map(|a| a.module_id.as_str())
            .ok_or_else(|| DeriveError::MissingBinding(f.name.clone()))
    };
    let mut graph = DiGraph::new();
    for &id in &selected {
        graph.add_node(module_of(id)?);
    }
    for &id in &selected {
        if let Some(parent) = model.feature(id).parent {
            if selected.contains(&parent) {
                graph.add_edge(module_of(id)?, module_of(parent)?);
            }
        }
    }
    for c in model.constraints() {
        if c.kind == ConstraintKind::Requires && selected.contains(&c.from) && selected.contains(&c.to) {
            graph.add_edge(module_of(c.from)?, module_of(c.to)?);
        }
    }
    Ok(graph)
}

/// Strongly connected components of two or more modules.
pub fn detect_cycles(graph: &ModuleGraph) -> Vec<Vec<String>> {
    graph.cycles()
}

/// `PtBR` becomes `pt_BR`; names of any other shape are kept as they are.
pub fn locale_of(feature: &str) -> String {
    let c: Vec<char> = feature.chars().collect();
    if c.len() == 4 && c[0].is_ascii_uppercase() && c[1].is_ascii_lowercase() && c[2].is_ascii_uppercase() && c[3].is_ascii_uppercase() {
        format!("{}{}_{}{}", c[0].to_ascii_lowercase(), c[1], c[2], c[3])
    } else {
        feature.to_string()
    }
}

/// Derives the manifest of `config` against the model as of `version`.
///
/// Deselections of features that do not exist yet in `version` are accepted
/// and dropped, so one configuration file can describe a product across
/// releases. Selecting such a feature is an error. On a cyclic module graph
/// the manifest is still built (modules in name order) and returned inside
/// [`DeriveError::Cycle`].
pub fn derive_product(
    model: &FeatureModel,
    config: &Configuration,
    product_name: &str,
    version: u32,
) -> Result<ProductManifest, DeriveError> {
    let versioned = filter_by_version(model, version)?;
    // Unknown names are reported against the full model first.
    config.resolve(model)?;
    if let Some(f) = config.selected.iter().find(|n| versioned.find(n).is_none()) {
        return Err(DeriveError::NotInVersion { feature: f.clone(), version });
    }
    let mut scoped = config.clone();
    scoped.deselected.retain(|n| versioned.find(n).is_some());
    scoped = scoped.with_total_for(&versioned);

    let graph = build_module_graph(&versioned, &scoped)?;
    let cycles = detect_cycles(&graph);

    let mut layers: BTreeMap<&str, BTreeSet<Layer>> = BTreeMap::new();
    for name in &scoped.selected {
        let f = versioned.feature(versioned.find(name).expect("resolved"));
        if let Some(a) = &f.asset {
            layers.entry(a.module_id.as_str()).or_default().extend(a.layers.iter().copied());
        }
    }
    let order = graph
        .topological_order()
        .unwrap_or_else(|| graph.nodes.iter().cloned().collect());
    let modules = order
        .into_iter()
        .map(|m| ModuleEntry { layers: layers[m.as_str()].clone(), module_id: m })
        .collect();

    let mut languages = Vec::new();
    for g in versioned.groups() {
        if versioned.name_of(g.parent) == LANGUAGE_PARENT {
            for &m in &g.members {
                if scoped.selected.contains(versioned.name_of(m)) {
                    languages.push(locale_of(versioned.name_of(m)));
                }
            }
        }
    }

    let manifest = ProductManifest {
        product_name: product_name.to_string(),
        model_name: model.name().to_string(),
        version,
        features: scoped.selected.iter().cloned().collect(),
        modules,
        languages,
        cycle_count: cycles.len(),
    };
    if cycles.is_empty() {
        Ok(manifest)
    } else {
        Err(DeriveError::Cycle { manifest: Box::new(manifest), cycles })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("manifest line {line}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

fn join_layers(layers: &BTreeSet<Layer>) -> String {
    layers.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(",")
}

/// Line-oriented manifest text. The `languages:` line is omitted when empty.
pub fn write_manifest(m: &ProductManifest) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "manifest {}", m.product_name);
    let _ = writeln!(out, "model {} v{}", m.model_name, m.version);
    let _ = writeln!(out, "features: {}", m.features.join(","));
    for e in &m.modules {
        let _ = writeln!(out, "module {} layers={}", e.module_id, join_layers(&e.layers));
    }
    if !m.languages.is_empty() {
        let _ = writeln!(out, "languages: {}", m.languages.join(","));
    }
    let _ = writeln!(out, "cycles: {}", m.cycle_count);
    out
}

fn split_list(s: &str) -> Vec<String> {
    if s.is_empty() {
        Vec::new()
    } else {
        s.split(',').map(str::to_string).collect()
    }
}

pub fn read_manifest(text: &str) -> Result<ProductManifest, ManifestError> {
    let err = |line: usize, message: &str| ManifestError { line, message: message.to_string() };
    let lines: Vec<&str> = text.lines().collect();
    let mut it = lines.iter().enumerate().map(|(i, l)| (i + 1, *l)).peekable();

    let (n, l) = it.next().ok_or_else(|| err(1, "empty manifest"))?;
    let product_name = l.strip_prefix("manifest ").filter(|s| !s.is_empty()).ok_or_else(|| err(n, "expected `manifest <name>`"))?;

    let (n, l) = it.next().ok_or_else(|| err(n + 1, "missing model line"))?;
    let rest = l.strip_prefix("model ").ok_or_else(|| err(n, "expected `model <name> v<version>`"))?;
    let (model_name, ver) = rest.rsplit_once(" v").ok_or_else(|| err(n, "expected `model <name> v<version>`"))?;
    let version: u32 = ver.parse().map_err(|_| err(n, "invalid version"))?;

    let (n, l) = it.next().ok_or_else(|| err(n + 1, "missing features line"))?;
    let features = split_list(l.strip_prefix("features: ").or_else(|| (l == "features:").then_some("")).ok_or_else(|| err(n, "expected `features:`"))?);

    let mut modules = Vec::new();
    let mut languages = Vec::new();
    let mut cycle_count = None;
    for (n, l) in it {
        if cycle_count.is_some() {
            return Err(err(n, "content after `cycles:`"));
        }
        if let Some(rest) = l.strip_prefix("module ") {
            if !languages.is_empty() {
                return Err(err(n, "module after languages"));
            }
            let (id, layers) = rest.split_once(" layers=").ok_or_else(|| err(n, "expected `module <id> layers=<list>`"))?;
            let layers = layers
                .split(',')
                .map(|s| Layer::parse(s).ok_or_else(|| err(n, "unknown layer")))
                .collect::<Result<BTreeSet<_>, _>>()?;
            modules.push(ModuleEntry { module_id: id.to_string(), layers });
        } else if let Some(rest) = l.strip_prefix("languages: ") {
            languages = split_list(rest);
            if languages.is_empty() {
                return Err(err(n, "empty languages line"));
            }
        } else if let Some(rest) = l.strip_prefix("cycles: ") {
            cycle_count = Some(rest.parse().map_err(|_| err(n, "invalid cycle count"))?);
        } else {
            return Err(err(n, "unknown key"));
        }
    }
    let manifest = ProductManifest {
        product_name: product_name.to_string(),
        model_name: model_name.to_string(),
        version,
        features,
        modules,
        languages,
        cycle_count: cycle_count.ok_or_else(|| err(lines.len() + 1, "missing `cycles:` line"))?,
    };
    if write_manifest(&manifest) != text {
        return Err(err(1, "manifest is not in canonical form"));
    }
    Ok(manifest)
}
