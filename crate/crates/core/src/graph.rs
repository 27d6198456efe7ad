//! Directed graphs over string-named nodes: strongly connected components
//! (iterative Tarjan) and deterministic topological ordering.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

/// A directed graph. An edge `(a, b)` reads "a depends on b".
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
}

impl DiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, n: impl Into<String>) {
        self.nodes.insert(n.into());
    }

    /// Adds an edge between existing or new nodes; self-edges are ignored.
    pub fn add_edge(&mut self, from: impl Into<String>, to: impl Into<String>) {
        let (from, to) = (from.into(), to.into());
        self.nodes.insert(from.clone());
        self.nodes.insert(to.clone());
        if from != to {
            self.edges.insert((from, to));
        }
    }

    fn indexed(&self) -> (Vec<&str>, Vec<Vec<usize>>) {
        let names: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut adj = vec![Vec::new(); names.len()];
        for (a, b) in &self.edges {
            if let (Some(&i), Some(&j)) = (index.get(a.as_str()), index.get(b.as_str())) {
                adj[i].push(j);
            }
        }
        (names, adj)
    }

    /// All strongly connected components, each sorted, ordered by their
    /// smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<String>> {
        let (names, adj) = self.indexed();
        let n = names.len();
        const UNVISITED: usize = usize::MAX;
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut components: Vec<Vec<String>> = Vec::new();

        for start in 0..n {
            if index[start] != UNVISITED {
                continue;
            }
            // (node, next edge position)
            let mut work = vec![(start, 0usize)];
            index[start] = next_index;
            low[start] = next_index;
            next_index += 1;
            stack.push(start);
            on_stack[start] = true;

            while let Some(&mut (v, ref mut pos)) = work.last_mut() {
                if *pos < adj[v].len() {
                    let w = adj[v][*pos];
                    *pos += 1;
                    if index[w] == UNVISITED {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        work.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(names[w].to_string());
                        if w == v {
                            break;
                        }
                    }
                    comp.sort();
                    components.push(comp);
                }
            }
        }
        components.sort();
        components
    }

    /// Components with at least two nodes.
    pub fn cycles(&self) -> Vec<Vec<String>> {
        self.strongly_connected_components().into_iter().filter(|c| c.len() >= 2).collect()
    }

    /// Orders nodes so every dependency comes before its dependents, picking
    /// the smallest name among the ready nodes. `None` if the graph is cyclic.
    pub fn topological_order(&self) -> Option<Vec<String>> {
        let (names, adj) = self.indexed();
        let n = names.len();
        // adj[i] holds the dependencies of i; count them and invert.
        let mut pending: Vec<usize> = adj.iter().map(Vec::len).collect();
        let mut dependents = vec![Vec::new(); n];
        for (i, deps) in adj.iter().enumerate() {
            for &d in deps {
                dependents[d].push(i);
            }
        }
        // Indices follow name order, so the smallest index is the smallest name.
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| pending[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(names[i].to_string());
            for &d in &dependents[i] {
                pending[d] -= 1;
                if pending[d] == 0 {
                    ready.push(Reverse(d));
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str)], extra: &[&str]) -> DiGraph {
        let mut g = DiGraph::new();
        for (a, b) in edges {
            g.add_edge(*a, *b);
        }
        for n in extra {
            g.add_node(*n);
        }
        g
    }

    #[test]
    fn two_node_cycle() {
        let g = graph(&[("A", "B"), ("B", "A")], &[]);
        assert_eq!(g.cycles(), vec![vec!["A".to_string(), "B".to_string()]]);
        assert_eq!(g.topological_order(), None);
    }

    #[test]
    fn ring_plus_isolated_node() {
        let g = graph(&[("A", "B"), ("B", "C"), ("C", "A")], &["D"]);
        assert_eq!(g.cycles(), vec![vec!["A".to_string(), "B".into(), "C".into()]]);
        assert_eq!(g.strongly_connected_components().len(), 2);
    }

    #[test]
    fn topological_order_breaks_ties_by_name() {
        let g = graph(&[("b", "root"), ("a", "root"), ("c", "a")], &[]);
        assert_eq!(g.topological_order().unwrap(), ["root", "a", "b", "c"]);
        assert!(g.cycles().is_empty());
    }

    #[test]
    fn self_edges_ignored() {
        let g = graph(&[("A", "A")], &[]);
        assert!(g.edges.is_empty());
        assert!(g.cycles().is_empty());
    }
}
