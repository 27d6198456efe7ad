//! Text formats: `.fm` feature models and `.cfg` configurations.

mod config_text;
mod diagnostic;
mod lexer;
mod model_text;

pub use config_text::{parse_configuration, parse_configuration_named, serialize_configuration};
pub use diagnostic::{render, DiagnosticCode, ParseDiagnostic, Severity, SourceSpan};
pub use model_text::{parse_model, parse_model_full, parse_model_named, serialize_model};

/// Source of the WebSPL reference model.
pub const WEBSPL_FM: &str = include_str!("../../fixtures/webspl.fm");
/// Configuration selecting the mandatory features and both languages.
pub const WEBSPL_MANDATORY_ONLY_CFG: &str = include_str!("../../fixtures/mandatory-only.cfg");
/// Configuration selecting every feature.
pub const WEBSPL_ALL_FEATURES_CFG: &str = include_str!("../../fixtures/all-features.cfg");

/// The parsed WebSPL reference model.
pub fn webspl() -> crate::fm::FeatureModel {
    parse_model_named(WEBSPL_FM, "webspl.fm").expect("reference model parses")
}
