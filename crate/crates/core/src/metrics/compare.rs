//! Four-column product comparison: the conventional application (CWA), the
//! product-line core (SPL), the derived product's own code (DWA), and the
//! full derived application (SAWS = SPL + DWA), with SAWS − CWA deltas.

use serde::{Deserialize, Serialize};

use super::report::MetricsReport;
use super::Tenths;

/// One metric across the four columns. Values are integers scaled by
/// `10^decimals`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub category: String,
    pub metric: String,
    /// Key used in the `key=value` rendering.
    pub key: String,
    pub decimals: u8,
    pub cwa: i64,
    pub spl: i64,
    pub dwa: i64,
    pub saws: i64,
    pub delta: i64,
}

impl ComparisonRow {
    fn new(category: &str, metric: &str, key: &str, decimals: u8, cwa: i64, spl: i64, dwa: i64) -> Self {
        let saws = spl + dwa;
        Self {
            category: category.into(),
            metric: metric.into(),
            key: key.into(),
            decimals,
            cwa,
            spl,
            dwa,
            saws,
            delta: saws - cwa,
        }
    }

    fn format(&self, v: i64) -> String {
        match self.decimals {
            0 => v.to_string(),
            _ => Tenths(v).to_string(),
        }
    }

    fn format_delta(&self, v: i64) -> String {
        let s = self.format(v);
        if v > 0 {
            format!("+{s}")
        } else {
            s
        }
    }

    /// Column values as rendered: CWA, SPL, DWA, SAWS, delta.
    pub fn cells(&self) -> [String; 5] {
        [
            self.format(self.cwa),
            self.format(self.spl),
            self.format(self.dwa),
            self.format(self.saws),
            self.format_delta(self.delta),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn row(&self, key: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.key == key)
    }

    /// Debt delta in tenths of an hour at eight hours per day.
    pub fn debt_delta_hours(&self) -> Tenths {
        Tenths(self.row("debt_days").map_or(0, |r| r.delta) * 8)
    }
}

pub fn compare(baseline: &MetricsReport, spl: &MetricsReport, derived: &MetricsReport) -> ComparisonReport {
    let col = |f: fn(&MetricsReport) -> i64| (f(baseline), f(spl), f(derived));
    let row = |category, metric, key, decimals, (c, s, d): (i64, i64, i64)| {
        ComparisonRow::new(category, metric, key, decimals, c, s, d)
    };
    ComparisonReport {
        rows: vec![
            row("Complexity", "Complexity per class", "complexity", 0, col(|r| r.total_complexity as i64)),
            row("Size", "Number of Code Lines", "code_lines", 0, col(|r| r.total_code_lines as i64)),
            row("Design", "Package Cycles", "package_cycles", 0, col(|r| r.package_cycles as i64)),
            row("Duplicity", "Duplicate Lines", "duplicate_lines", 0, col(|r| r.duplicate_lines as i64)),
            row("Technical Debt", "Technical Debt Level", "debt_days", 1, col(|r| r.debt_days.0)),
        ],
    }
}

/// Aligned plain-text table: text columns left-aligned, numbers right-aligned.
pub fn render_table(report: &ComparisonReport) -> String {
    let header = ["Category", "Metric", "CWA", "SPL", "DWA", "SAWS", "Delta"].map(String::from);
    let mut rows = vec![header];
    for r in &report.rows {
        let [c, s, d, w, delta] = r.cells();
        rows.push([r.category.clone(), r.metric.clone(), c, s, d, w, delta]);
    }
    let widths: Vec<usize> = (0..7).map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in &rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, c)| if i < 2 { format!("{c:<w$}", w = widths[i]) } else { format!("{c:>w$}", w = widths[i]) })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    let hours = report.debt_delta_hours();
    if let Some(debt) = report.row("debt_days") {
        let sign = if hours.0 > 0 { "+" } else { "" };
        out.push_str(&format!(
            "\nTechnical debt delta: {} days = {sign}{hours} hours at 8 h/day\n",
            debt.format_delta(debt.delta)
        ));
    }
    out.push_str("CWA: conventional application; SPL: product-line core; DWA: derived product code; SAWS: SPL + DWA\n");
    out
}

/// Machine-readable rendering, one `row.column=value` per line.
pub fn render_key_values(report: &ComparisonReport) -> String {
    let mut out = String::from("format=splforge-comparison/1\n");
    for r in &report.rows {
        let [c, s, d, w, delta] = r.cells();
        for (col, v) in [("cwa", c), ("spl", s), ("dwa", d), ("saws", w), ("delta", delta)] {
            out.push_str(&format!("{}.{col}={v}\n", r.key));
        }
    }
    let hours = report.debt_delta_hours();
    let sign = if hours.0 > 0 { "+" } else { "" };
    out.push_str(&format!("debt_hours.delta={sign}{hours}\n"));
    out
}
