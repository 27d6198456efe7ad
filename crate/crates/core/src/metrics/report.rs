//! Aggregated corpus measurements and the flat `key=value` `.metrics` format.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::debt::{minutes_to_days, DebtSummary};
use super::duplicates::DuplicateReport;
use super::scan::{FunctionMetric, SourceUnit};
use super::{Hundredths, Tenths};

pub const REPORT_FORMAT: &str = "splforge-metrics/1";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Sorted by path.
    pub files: Vec<SourceUnit>,
    pub total_complexity: u64,
    pub mean_complexity_per_file: Hundredths,
    pub total_code_lines: u64,
    pub duplicate_lines: u64,
    pub duplicate_blocks: u64,
    pub package_cycles: u64,
    pub debt_findings: u64,
    pub debt_minutes: u64,
    pub debt_days: Tenths,
}

pub fn aggregate(
    mut units: Vec<SourceUnit>,
    duplicates: &DuplicateReport,
    cycles: &[Vec<String>],
    debt: &DebtSummary,
) -> MetricsReport {
    units.sort_by(|a, b| a.path.cmp(&b.path));
    let total_complexity: u64 = units.iter().map(|u| u.complexity() as u64).sum();
    let n = units.len() as u64;
    // hundredths, rounded half up
    let mean = if n == 0 { 0 } else { (200 * total_complexity + n) / (2 * n) };
    MetricsReport {
        total_code_lines: units.iter().map(|u| u.code_lines as u64).sum(),
        files: units,
        total_complexity,
        mean_complexity_per_file: Hundredths(mean as i64),
        duplicate_lines: duplicates.duplicate_lines as u64,
        duplicate_blocks: duplicates.blocks.len() as u64,
        package_cycles: cycles.len() as u64,
        debt_findings: debt.findings.len() as u64,
        debt_minutes: debt.minutes,
        debt_days: debt.days,
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn write_report(report: &MetricsReport) -> String {
    let mut lines = vec![format!("format={REPORT_FORMAT}"), format!("files={}", report.files.len())];
    for (i, u) in report.files.iter().enumerate() {
        let p = format!("file.{}", i + 1);
        lines.push(format!("{p}.path={}", u.path));
        lines.push(format!("{p}.package={}", u.package_name));
        lines.push(format!("{p}.imports={}", join(&u.imports)));
        lines.push(format!("{p}.physical_lines={}", u.physical_lines));
        lines.push(format!("{p}.code_lines={}", u.code_lines));
        lines.push(format!("{p}.comment_lines={}", u.comment_lines));
        lines.push(format!("{p}.blank_lines={}", u.blank_lines));
        lines.push(format!("{p}.todo_lines={}", join(&u.todo_lines)));
        lines.push(format!("{p}.complexity={}", u.complexity()));
        lines.push(format!("{p}.functions={}", u.functions.len()));
        for (j, f) in u.functions.iter().enumerate() {
            let q = format!("{p}.function.{}", j + 1);
            lines.push(format!("{q}.name={}", f.name));
            lines.push(format!("{q}.start_line={}", f.start_line));
            lines.push(format!("{q}.effective_lines={}", f.effective_lines));
            lines.push(format!("{q}.complexity={}", f.complexity));
            lines.push(format!("{q}.max_nesting={}", f.max_nesting));
        }
    }
    lines.push(format!("total_complexity={}", report.total_complexity));
    lines.push(format!("mean_complexity_per_file={}", report.mean_complexity_per_file));
    lines.push(format!("total_code_lines={}", report.total_code_lines));
    lines.push(format!("duplicate_lines={}", report.duplicate_lines));
    lines.push(format!("duplicate_blocks={}", report.duplicate_blocks));
    lines.push(format!("package_cycles={}", report.package_cycles));
    lines.push(format!("debt_findings={}", report.debt_findings));
    lines.push(format!("debt_minutes={}", report.debt_minutes));
    lines.push(format!("debt_days={}", report.debt_days));
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ReportError {
    pub line: usize,
    pub message: String,
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, message: impl Into<String>) -> ReportError {
        ReportError { line: self.pos.max(1), message: message.into() }
    }

    fn value(&mut self, key: &str) -> Result<&'a str, ReportError> {
        let Some(line) = self.lines.get(self.pos).copied() else {
            return Err(ReportError { line: self.lines.len() + 1, message: format!("missing `{key}`") });
        };
        self.pos += 1;
        let (k, v) = line.split_once('=').ok_or_else(|| self.err("expected `key=value`"))?;
        if k != key {
            return Err(self.err(format!("expected key `{key}`, found `{k}`")));
        }
        Ok(v)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ReportError> {
        let v = self.value(key)?;
        v.parse().map_err(|_| self.err(format!("invalid value `{v}` for `{key}`")))
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Vec<T>, ReportError> {
        let v = self.value(key)?;
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',').map(|s| s.parse().map_err(|_| self.err(format!("invalid item `{s}` in `{key}`")))).collect()
    }
}

/// Reads a report written by [`write_report`]. Keys must appear in the
/// written order and values in canonical form; the debt days must match the
/// minutes and duplicate lines may not exceed code lines.
pub fn read_report(text: &str) -> Result<MetricsReport, ReportError> {
    let body = text.strip_suffix('\n').ok_or(ReportError { line: 1, message: "missing final newline".into() })?;
    let mut r = Reader { lines: body.split('\n').collect(), pos: 0 };
    let format = r.value("format")?;
    if format != REPORT_FORMAT {
        return Err(r.err(format!("unsupported format `{format}`")));
    }
    let file_count: usize = r.parse("files")?;
    let mut files = Vec::new();
    for i in 1..=file_count {
        let p = format!("file.{i}");
        let mut unit = SourceUnit {
            path: r.value(&format!("{p}.path"))?.to_string(),
            package_name: r.value(&format!("{p}.package"))?.to_string(),
            imports: r.list(&format!("{p}.imports"))?,
            physical_lines: r.parse(&format!("{p}.physical_lines"))?,
            code_lines: r.parse(&format!("{p}.code_lines"))?,
            comment_lines: r.parse(&format!("{p}.comment_lines"))?,
            blank_lines: r.parse(&format!("{p}.blank_lines"))?,
            todo_lines: r.list(&format!("{p}.todo_lines"))?,
            functions: Vec::new(),
        };
        if unit.code_lines + unit.comment_lines + unit.blank_lines != unit.physical_lines {
            return Err(r.err(format!("{p}: line counts do not add up to physical lines")));
        }
        let complexity: usize = r.parse(&format!("{p}.complexity"))?;
        let function_count: usize = r.parse(&format!("{p}.functions"))?;
        for j in 1..=function_count {
            let q = format!("{p}.function.{j}");
            unit.functions.push(FunctionMetric {
                name: r.value(&format!("{q}.name"))?.to_string(),
                start_line: r.parse(&format!("{q}.start_line"))?,
                effective_lines: r.parse(&format!("{q}.effective_lines"))?,
                complexity: r.parse(&format!("{q}.complexity"))?,
                max_nesting: r.parse(&format!("{q}.max_nesting"))?,
            });
        }
        if unit.complexity() != complexity {
            return Err(r.err(format!("{p}: complexity is not the sum of its functions")));
        }
        files.push(unit);
    }
    let report = MetricsReport {
        files,
        total_complexity: r.parse("total_complexity")?,
        mean_complexity_per_file: r.parse("mean_complexity_per_file")?,
        total_code_lines: r.parse("total_code_lines")?,
        duplicate_lines: r.parse("duplicate_lines")?,
        duplicate_blocks: r.parse("duplicate_blocks")?,
        package_cycles: r.parse("package_cycles")?,
        debt_findings: r.parse("debt_findings")?,
        debt_minutes: r.parse("debt_minutes")?,
        debt_days: r.parse("debt_days")?,
    };
    if r.pos < r.lines.len() {
        r.pos += 1;
        return Err(r.err("unexpected content after `debt_days`"));
    }
    if report.debt_days != minutes_to_days(report.debt_minutes) {
        return Err(ReportError { line: r.lines.len(), message: "debt_days does not match debt_minutes".into() });
    }
    if report.duplicate_lines > report.total_code_lines {
        return Err(ReportError { line: 0, message: "duplicate_lines exceeds total_code_lines".into() });
    }
    // Numbers like `+3` or `007` parse but are not canonical.
    let canonical = write_report(&report);
    if let Some((i, _)) = canonical.lines().zip(text.lines()).enumerate().find(|(_, (a, b))| a != b) {
        return Err(ReportError { line: i + 1, message: "value is not in canonical form".into() });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{measure, MeasureOptions};

    #[test]
    fn empty_corpus_is_all_zeros() {
        let r = measure(&[], &MeasureOptions::default()).unwrap();
        assert_eq!(r, MetricsReport::default());
        let text = write_report(&r);
        assert!(text.ends_with("debt_minutes=0\ndebt_days=0.0\n"));
        assert_eq!(read_report(&text).unwrap(), r);
    }

    #[test]
    fn round_trip_with_functions() {
        let files = vec![
            ("x/a.gsrc".to_string(), b"package x;\nimport y.Z;\nfunction f() {\n  if (a || b) {}\n}\n// FIXME\n".to_vec()),
            ("y/b.gsrc".to_string(), b"package y;\nfunction g() { return 1; }\nfunction h() {}\n".to_vec()),
        ];
        let r = measure(&files, &MeasureOptions::default()).unwrap();
        assert_eq!((r.total_complexity, r.mean_complexity_per_file), (5, Hundredths(250)));
        let text = write_report(&r);
        assert_eq!(read_report(&text).unwrap(), r);
        assert_eq!(write_report(&read_report(&text).unwrap()), text);
    }

    #[test]
    fn rejects_bad_input() {
        let good = write_report(&MetricsReport::default());
        assert!(read_report(&good.replace("files=0", "files=+0")).is_err());
        assert!(read_report(&good.replace("debt_days=0.0", "debt_days=0.1")).is_err());
        assert!(read_report(&good.replace("format=", "fmt=")).is_err());
        assert_eq!(read_report("format=splforge-metrics/1\nfiles\n").unwrap_err().line, 2);
        assert!(read_report(good.trim_end()).is_err());
        assert!(read_report(&format!("{good}extra=1\n")).is_err());
    }
}
