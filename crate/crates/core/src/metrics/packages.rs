//! Package import graph and its cycles.

use crate::graph::DiGraph;

use super::scan::SourceUnit;

/// Maps an import to a package in the corpus: the import itself when it
/// names a package, otherwise its longest dotted prefix that does
/// (`a.b.Type` resolves to `a.b`).
fn resolve_import<'a>(import: &str, packages: &'a std::collections::BTreeSet<String>) -> Option<&'a str> {
    let mut candidate = import;
    loop {
        if let Some(p) = packages.get(candidate) {
            return Some(p.as_str());
        }
        candidate = &candidate[..candidate.rfind('.')?];
    }
}

/// Nodes are the non-empty package names; `p -> q` when a file of `p`
/// imports something in `q`.
pub fn package_graph(units: &[SourceUnit]) -> DiGraph {
    let mut g = DiGraph::new();
    for u in units.iter().filter(|u| !u.package_name.is_empty()) {
        g.add_node(u.package_name.clone());
    }
    let packages = g.nodes.clone();
    for u in units.iter().filter(|u| !u.package_name.is_empty()) {
        for import in &u.imports {
            if let Some(target) = resolve_import(import, &packages) {
                g.add_edge(u.package_name.clone(), target);
            }
        }
    }
    g
}

/// Strongly connected components of two or more packages.
pub fn package_cycles(units: &[SourceUnit]) -> Vec<Vec<String>> {
    package_graph(units).cycles()
}
