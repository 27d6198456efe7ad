//! Browser bindings: propagation, product counting and a metrics scan.
//!
//! Every operation takes and returns strings (model text, JSON) so the
//! same functions run natively in tests and behind `wasm-bindgen` in the
//! browser. Errors are human-readable messages.

use serde::{Deserialize, Serialize};
use splforge_core::dsl::{parse_model_named, render};
use splforge_core::fm::{self, Configuration, FeatureModel};
use splforge_core::metrics::{self, write_report, MeasureOptions, MetricsReport};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Decisions {
    #[serde(default)]
    selected: Vec<String>,
    #[serde(default)]
    deselected: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceFile {
    path: String,
    text: String,
}

#[derive(Debug, Serialize)]
struct Measured {
    report: MetricsReport,
    /// The report in `.metrics` text form.
    text: String,
}

fn load(model_text: &str, decisions_json: &str) -> Result<(FeatureModel, Configuration), String> {
    let model = parse_model_named(model_text, "model.fm").map_err(|d| render(&d))?;
    let d: Decisions = if decisions_json.trim().is_empty() {
        Decisions::default()
    } else {
        serde_json::from_str(decisions_json).map_err(|e| format!("malformed decisions: {e}"))?
    };
    let config = Configuration::new(d.selected, d.deselected);
    config.resolve(&model).map_err(|e| e.to_string())?;
    let config = config.with_total_for(&model);
    Ok((model, config))
}

/// Propagates `{"selected": [...], "deselected": [...]}` over the model;
/// returns `{forcedSelected, forcedDeselected, conflict, openFeatures}`.
pub fn propagate(model_text: &str, decisions_json: &str) -> Result<String, String> {
    let (model, config) = load(model_text, decisions_json)?;
    let result = fm::propagate(&model, &config).map_err(|e| e.to_string())?;
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

/// Number of products extending the decisions: `{"products": n}`.
pub fn count(model_text: &str, decisions_json: &str) -> Result<String, String> {
    let (model, config) = load(model_text, decisions_json)?;
    let n = fm::count_extensions(&model, &config).map_err(|e| e.to_string())?;
    Ok(serde_json::json!({ "products": n }).to_string())
}

/// Measures `[{"path": ..., "text": ...}]` with default options.
pub fn measure(files_json: &str) -> Result<String, String> {
    let files: Vec<SourceFile> = serde_json::from_str(files_json).map_err(|e| format!("malformed files: {e}"))?;
    let files: Vec<(String, Vec<u8>)> = files.into_iter().map(|f| (f.path, f.text.into_bytes())).collect();
    let report = metrics::measure(&files, &MeasureOptions::default()).map_err(|e| e.to_string())?;
    let text = write_report(&report);
    serde_json::to_string(&Measured { report, text }).map_err(|e| e.to_string())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen]
    pub fn propagate(model_text: &str, decisions_json: &str) -> Result<String, JsError> {
        super::propagate(model_text, decisions_json).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn count(model_text: &str, decisions_json: &str) -> Result<String, JsError> {
        super::count(model_text, decisions_json).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn measure(files_json: &str) -> Result<String, JsError> {
        super::measure(files_json).map_err(|e| JsError::new(&e))
    }
}
