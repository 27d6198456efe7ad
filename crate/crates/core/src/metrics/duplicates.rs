//! Duplicate code detection over normalized line windows.
//!
//! Code lines are trimmed and whitespace-collapsed; blank and comment-only
//! lines are skipped. Every window of `min_block` consecutive normalized
//! lines that occurs at least twice is a duplicate, and overlapping windows
//! that move in lock-step are merged into maximal blocks.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::scan::{split_lines, LineKind};

pub const DEFAULT_MIN_BLOCK: usize = 6;

/// A source file as seen by the detector.
#[derive(Debug, Clone, Copy)]
pub struct SourceText<'a> {
    pub path: &'a str,
    pub text: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occurrence {
    pub path: String,
    /// Physical line of the first normalized line.
    pub start_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateBlock {
    pub occurrences: Vec<Occurrence>,
    /// Normalized lines per occurrence.
    pub line_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateReport {
    pub blocks: Vec<DuplicateBlock>,
    /// Distinct physical lines covered by any duplicate window.
    pub duplicate_lines: usize,
}

fn normalize(line: &str) -> String {
    line.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Finds duplicated blocks of at least `min_block` normalized lines
/// (values below 2 are treated as 2).
pub fn detect_duplicates(files: &[SourceText<'_>], min_block: usize) -> DuplicateReport {
    let min_block = min_block.max(2);
    // Per file: (physical line, normalized text) of code lines.
    let normalized: Vec<Vec<(usize, String)>> = files
        .iter()
        .map(|f| {
            split_lines(f.text)
                .iter()
                .enumerate()
                .filter(|(_, l)| l.kind == LineKind::Code)
                .map(|(i, l)| (i + 1, normalize(l.raw)))
                .collect()
        })
        .collect();

    let mut by_text: HashMap<Vec<&str>, Vec<(usize, usize)>> = HashMap::new();
    for (fi, lines) in normalized.iter().enumerate() {
        if lines.len() < min_block {
            continue;
        }
        for start in 0..=lines.len() - min_block {
            let key: Vec<&str> = lines[start..start + min_block].iter().map(|(_, s)| s.as_str()).collect();
            by_text.entry(key).or_default().push((fi, start));
        }
    }

    let dup_sets: Vec<Vec<(usize, usize)>> = by_text.into_values().filter(|occ| occ.len() >= 2).collect();
    let known: HashSet<&Vec<(usize, usize)>> = dup_sets.iter().collect();

    let mut covered: BTreeSet<(usize, usize)> = BTreeSet::new();
    for occ in &dup_sets {
        for &(fi, start) in occ {
            for (line, _) in &normalized[fi][start..start + min_block] {
                covered.insert((fi, *line));
            }
        }
    }

    let shifted = |occ: &Vec<(usize, usize)>, forward: bool| -> Option<Vec<(usize, usize)>> {
        occ.iter()
            .map(|&(f, s)| if forward { Some((f, s + 1)) } else { s.checked_sub(1).map(|s| (f, s)) })
            .collect()
    };

    let mut blocks = Vec::new();
    for occ in &dup_sets {
        if shifted(occ, false).is_some_and(|prev| known.contains(&prev)) {
            continue;
        }
        let mut len = min_block;
        let mut cur = occ.clone();
        while let Some(next) = shifted(&cur, true).filter(|n| known.contains(n)) {
            len += 1;
            cur = next;
        }
        let mut occurrences: Vec<Occurrence> = occ
            .iter()
            .map(|&(fi, s)| Occurrence { path: files[fi].path.to_string(), start_line: normalized[fi][s].0 })
            .collect();
        occurrences.sort();
        blocks.push(DuplicateBlock { occurrences, line_count: len });
    }
    blocks.sort_by(|a, b| a.occurrences.cmp(&b.occurrences).then(a.line_count.cmp(&b.line_count)));

    DuplicateReport { blocks, duplicate_lines: covered.len() }
}
