//! Remediation-cost technical debt over a fixed, configurable rulebook.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::duplicates::DuplicateReport;
use super::scan::SourceUnit;
use super::Tenths;

/// Minutes in one workday of eight hours.
pub const MINUTES_PER_DAY: u64 = 480;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DebtRule {
    LongFunction,
    HighComplexity,
    TodoComment,
    DuplicatedBlock,
    DeepNesting,
}

impl fmt::Display for DebtRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Thresholds and costs. Thresholds are exclusive: a function is long when
/// its effective lines exceed `long_function_lines`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebtRules {
    pub long_function_lines: usize,
    pub long_function_minutes: u64,
    pub complexity_cap: usize,
    pub minutes_per_complexity_point: u64,
    pub todo_minutes: u64,
    pub duplicate_occurrence_minutes: u64,
    pub nesting_cap: usize,
    pub deep_nesting_minutes: u64,
}

impl Default for DebtRules {
    fn default() -> Self {
        Self {
            long_function_lines: 30,
            long_function_minutes: 20,
            complexity_cap: 10,
            minutes_per_complexity_point: 10,
            todo_minutes: 10,
            duplicate_occurrence_minutes: 15,
            nesting_cap: 4,
            deep_nesting_minutes: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DebtFinding {
    pub path: String,
    pub line: usize,
    pub rule: DebtRule,
    pub remediation_minutes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebtSummary {
    pub findings: Vec<DebtFinding>,
    pub minutes: u64,
    pub days: Tenths,
}

/// Workdays to one decimal, rounding halves up.
pub fn minutes_to_days(minutes: u64) -> Tenths {
    // tenths = minutes * 10 / 480, rounded half up
    Tenths(((2 * minutes + 48) / 96) as i64)
}

pub fn compute_debt(units: &[SourceUnit], duplicates: &DuplicateReport, rules: &DebtRules) -> DebtSummary {
    let mut findings = Vec::new();
    let mut add = |path: &str, line: usize, rule: DebtRule, minutes: u64| {
        if minutes > 0 {
            findings.push(DebtFinding { path: path.to_string(), line, rule, remediation_minutes: minutes });
        }
    };
    for u in units {
        for f in &u.functions {
            if f.effective_lines > rules.long_function_lines {
                add(&u.path, f.start_line, DebtRule::LongFunction, rules.long_function_minutes);
            }
            if f.complexity > rules.complexity_cap {
                let over = (f.complexity - rules.complexity_cap) as u64;
                add(&u.path, f.start_line, DebtRule::HighComplexity, over * rules.minutes_per_complexity_point);
            }
            if f.max_nesting > rules.nesting_cap {
                add(&u.path, f.start_line, DebtRule::DeepNesting, rules.deep_nesting_minutes);
            }
        }
        for &line in &u.todo_lines {
            add(&u.path, line, DebtRule::TodoComment, rules.todo_minutes);
        }
    }
    for block in &duplicates.blocks {
        for occ in block.occurrences.iter().skip(1) {
            add(&occ.path, occ.start_line, DebtRule::DuplicatedBlock, rules.duplicate_occurrence_minutes);
        }
    }
    findings.sort();
    let minutes = findings.iter().map(|f| f.remediation_minutes).sum();
    DebtSummary { findings, minutes, days: minutes_to_days(minutes) }
}
