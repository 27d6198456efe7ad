//! `.cfg` configuration files: one `+Name` or `-Name` decision per line,
//! `#` comment lines and blank lines ignored.

use std::collections::HashMap;

use super::diagnostic::{DiagnosticCode, ParseDiagnostic, SourceSpan};
use crate::fm::model::is_identifier;
use crate::fm::{Configuration, FeatureModel};

pub fn parse_configuration(text: &str, model: &FeatureModel) -> Result<Configuration, Vec<ParseDiagnostic>> {
    parse_configuration_named(text, model, "<input>")
}

/// Reads explicit decisions only; nothing is implied. `total` is set when
/// every feature of `model` is decided.
pub fn parse_configuration_named(
    text: &str,
    model: &FeatureModel,
    file: &str,
) -> Result<Configuration, Vec<ParseDiagnostic>> {
    let mut config = Configuration::default();
    let mut diagnostics = Vec::new();
    let mut first_seen: HashMap<String, u32> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let column = (raw.chars().take_while(|c| c.is_whitespace()).count() + 1) as u32;
        let span = SourceSpan { file: file.to_string(), line: line_no, column };
        let (select, name) = match trimmed.split_at(1) {
            ("+", rest) => (true, rest.trim()),
            ("-", rest) => (false, rest.trim()),
            _ => {
                diagnostics.push(ParseDiagnostic::error(
                    DiagnosticCode::Syntax,
                    span,
                    "expected `+Feature` or `-Feature`",
                ));
                continue;
            }
        };
        if !is_identifier(name) {
            diagnostics.push(ParseDiagnostic::error(
                DiagnosticCode::Syntax,
                span,
                format!("`{name}` is not a feature name"),
            ));
            continue;
        }
        if model.find(name).is_none() {
            diagnostics.push(ParseDiagnostic::error(
                DiagnosticCode::UnknownFeature,
                span,
                format!("unknown feature `{name}`"),
            ));
            continue;
        }
        if let Some(prev) = first_seen.get(name) {
            diagnostics.push(ParseDiagnostic::error(
                DiagnosticCode::DuplicateDecision,
                span,
                format!("feature `{name}` already decided on line {prev}"),
            ));
            continue;
        }
        first_seen.insert(name.to_string(), line_no);
        if select {
            config.selected.insert(name.to_string());
        } else {
            config.deselected.insert(name.to_string());
        }
    }

    if diagnostics.is_empty() {
        Ok(config.with_total_for(model))
    } else {
        Err(diagnostics)
    }
}

/// Selected features first, then deselected ones, each sorted by name.
pub fn serialize_configuration(config: &Configuration) -> String {
    let mut out = String::new();
    for n in &config.selected {
        out.push('+');
        out.push_str(n);
        out.push('\n');
    }
    for n in &config.deselected {
        out.push('-');
        out.push_str(n);
        out.push('\n');
    }
    out
}
