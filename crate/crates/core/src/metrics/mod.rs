//! Source metrics for `.gsrc` corpora: line partition, cyclomatic
//! complexity, duplicate lines, package cycles, technical debt, and the
//! four-column product comparison.

mod compare;
mod debt;
mod duplicates;
mod packages;
mod report;
mod scan;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compare::{compare, render_key_values, render_table, ComparisonReport, ComparisonRow};
pub use debt::{compute_debt, minutes_to_days, DebtFinding, DebtRule, DebtRules, DebtSummary, MINUTES_PER_DAY};
pub use duplicates::{detect_duplicates, DuplicateBlock, DuplicateReport, Occurrence, SourceText, DEFAULT_MIN_BLOCK};
pub use packages::{package_cycles, package_graph};
pub use report::{aggregate, read_report, write_report, MetricsReport, ReportError, REPORT_FORMAT};
pub use scan::{scan_file, scan_text, FunctionMetric, NonUtf8Input, SourceUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("`{0}` is not a decimal with the expected number of fraction digits")]
pub struct DecimalError(pub &'static str);

macro_rules! fixed_decimal {
    ($(#[$doc:meta])* $name:ident, $digits:expr, $scale:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub i64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let sign = if self.0 < 0 { "-" } else { "" };
                let abs = self.0.unsigned_abs();
                write!(f, "{sign}{}.{:0width$}", abs / $scale, abs % $scale, width = $digits)
            }
        }

        impl FromStr for $name {
            type Err = DecimalError;

            /// Accepts exactly the form produced by `Display`.
            fn from_str(s: &str) -> Result<Self, DecimalError> {
                let err = DecimalError(stringify!($name));
                let (neg, body) = match s.strip_prefix('-') {
                    Some(rest) => (true, rest),
                    None => (false, s),
                };
                let (int, frac) = body.split_once('.').ok_or(err)?;
                let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
                if !digits(int) || frac.len() != $digits || !digits(frac) {
                    return Err(err);
                }
                let v = int.parse::<i64>().map_err(|_| err)? * $scale + frac.parse::<i64>().map_err(|_| err)?;
                let v = if neg { -v } else { v };
                if $name(v).to_string() != s {
                    return Err(err);
                }
                Ok($name(v))
            }
        }
    };
}

fixed_decimal!(
    /// A decimal with one fraction digit, stored in tenths.
    Tenths,
    1,
    10
);
fixed_decimal!(
    /// A decimal with two fraction digits, stored in hundredths.
    Hundredths,
    2,
    100
);

/// Settings for a full corpus measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureOptions {
    pub min_block: usize,
    pub rules: DebtRules,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { min_block: DEFAULT_MIN_BLOCK, rules: DebtRules::default() }
    }
}

/// Scans, detects duplicates and cycles, computes debt and aggregates.
/// `files` are `(path, contents)` pairs in any order.
pub fn measure(files: &[(String, Vec<u8>)], options: &MeasureOptions) -> Result<MetricsReport, NonUtf8Input> {
    let mut sorted: Vec<(&str, &str)> = files
        .iter()
        .map(|(p, b)| std::str::from_utf8(b).map(|t| (p.as_str(), t)).map_err(|_| NonUtf8Input { path: p.clone() }))
        .collect::<Result<_, _>>()?;
    sorted.sort();
    let units: Vec<SourceUnit> = sorted.iter().map(|(p, t)| scan_text(t, p)).collect();
    let texts: Vec<SourceText<'_>> = sorted.iter().map(|&(path, text)| SourceText { path, text }).collect();
    let dups = detect_duplicates(&texts, options.min_block);
    let cycles = package_cycles(&units);
    let debt = compute_debt(&units, &dups, &options.rules);
    Ok(aggregate(units, &dups, &cycles, &debt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_display_and_parse() {
        assert_eq!(Tenths(106).to_string(), "10.6");
        assert_eq!(Tenths(-16).to_string(), "-1.6");
        assert_eq!(Tenths(0).to_string(), "0.0");
        assert_eq!(Hundredths(5).to_string(), "0.05");
        assert_eq!("12.2".parse::<Tenths>(), Ok(Tenths(122)));
        assert_eq!("-0.5".parse::<Tenths>(), Ok(Tenths(-5)));
        for bad in ["12", "1.25", "+1.0", "01.0", ".5", "-0.0", "1.x"] {
            assert!(bad.parse::<Tenths>().is_err(), "{bad}");
        }
        assert_eq!("3.50".parse::<Hundredths>(), Ok(Hundredths(350)));
    }

    #[test]
    fn measure_is_order_independent() {
        let a = ("b.gsrc".to_string(), b"package b;\nimport a;\nfunction f() { if (x) {} }\n".to_vec());
        let b = ("a.gsrc".to_string(), b"package a;\nimport b;\n// TODO\n".to_vec());
        let r1 = measure(&[a.clone(), b.clone()], &MeasureOptions::default()).unwrap();
        let r2 = measure(&[b, a], &MeasureOptions::default()).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.package_cycles, 1);
        assert_eq!(r1.files[0].path, "a.gsrc");
    }
}
