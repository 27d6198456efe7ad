//! Search procedures over encoded clause sets.
//!
//! `MaskSearch` is the exact engine for small models: an exhaustive
//! backtracking enumeration over bit masks that checks each clause as soon as
//! its highest variable is assigned. Feature ids are in parent-before-child
//! order, so tree clauses prune at the child. Larger models fall back to
//! unit propagation and a small DPLL procedure.

use std::ops::ControlFlow;

use super::encode::Clause;

/// Largest feature count for which analyses are exact.
pub const EXACT_BOUND: usize = 24;

#[derive(Debug, Clone, Copy)]
struct MaskClause {
    pos: u32,
    neg: u32,
}

pub(crate) struct MaskSearch {
    n: usize,
    /// Clauses bucketed by their highest variable.
    by_max: Vec<Vec<MaskClause>>,
}

impl MaskSearch {
    pub fn new(n: usize, clauses: &[Clause]) -> Self {
        assert!(n <= EXACT_BOUND, "mask search limited to {EXACT_BOUND} variables");
        let mut by_max = vec![Vec::new(); n];
        for c in clauses {
            let mut mc = MaskClause { pos: 0, neg: 0 };
            let mut max = 0;
            for l in &c.literals {
                let bit = 1u32 << l.feature.0;
                if l.positive {
                    mc.pos |= bit;
                } else {
                    mc.neg |= bit;
                }
                max = max.max(l.feature.0);
            }
            by_max[max].push(mc);
        }
        Self { n, by_max }
    }

    pub fn all_mask(&self) -> u32 {
        (1u32 << self.n) - 1
    }

    /// Visits every satisfying assignment that agrees with the fixed bits.
    pub fn for_each<F>(&self, fixed_true: u32, fixed_false: u32, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(u32) -> ControlFlow<()>,
    {
        if fixed_true & fixed_false != 0 || self.n == 0 {
            return ControlFlow::Continue(());
        }
        self.descend(0, 0, fixed_true, fixed_false, &mut visit)
    }

    fn descend<F>(&self, var: usize, value: u32, ft: u32, ff: u32, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(u32) -> ControlFlow<()>,
    {
        if var == self.n {
            return visit(value);
        }
        let bit = 1u32 << var;
        for choice in [false, true] {
            if (choice && ff & bit != 0) || (!choice && ft & bit != 0) {
                continue;
            }
            let v = if choice { value | bit } else { value };
            let ok = self.by_max[var].iter().all(|c| c.pos & v != 0 || c.neg & !v != 0);
            if ok {
                self.descend(var + 1, v, ft, ff, visit)?;
            }
        }
        ControlFlow::Continue(())
    }

    pub fn find(&self, fixed_true: u32, fixed_false: u32) -> Option<u32> {
        let mut found = None;
        let _ = self.for_each(fixed_true, fixed_false, |v| {
            found = Some(v);
            ControlFlow::Break(())
        });
        found
    }

    pub fn count(&self, fixed_true: u32, fixed_false: u32) -> u64 {
        let mut n = 0u64;
        let _ = self.for_each(fixed_true, fixed_false, |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }
}

pub(crate) type Assignment = Vec<Option<bool>>;

/// Fixpoint unit propagation. Returns `None` on a falsified clause.
pub(crate) fn unit_propagate(clauses: &[Clause], mut assignment: Assignment) -> Option<Assignment> {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for l in &c.literals {
                match assignment[l.feature.0] {
                    Some(v) if v == l.positive => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        open += 1;
                        unassigned = Some(*l);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return None,
                (1, Some(l)) => {
                    assignment[l.feature.0] = Some(l.positive);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Some(assignment);
        }
    }
}

/// Finds a satisfying total assignment extending `assignment`, deciding
/// variables in index order with unit propagation at every node.
pub(crate) fn dpll(clauses: &[Clause], assignment: Assignment) -> Option<Vec<bool>> {
    let assignment = unit_propagate(clauses, assignment)?;
    match assignment.iter().position(Option::is_none) {
        None => Some(assignment.into_iter().map(|v| v.unwrap_or(false)).collect()),
        Some(var) => [false, true].into_iter().find_map(|choice| {
            let mut next = assignment.clone();
            next[var] = Some(choice);
            dpll(clauses, next)
        }),
    }
}
