//! Feature-model semantics: encoding, validation, propagation, counting,
//! diagnostics and version filtering.

pub mod analysis;
pub mod config;
pub mod encode;
pub mod model;
mod solver;
pub mod version;

pub use analysis::{
    count, count_extensions, diagnostics, enumerate, propagate, AnalysisError, ModelDiagnostics, PropagationResult,
};
pub use config::{ConfigError, Configuration};
pub use encode::{check_selection, encode, Clause, ClauseKind, ConstraintSet, Literal, ValidationResult, Violation};
pub use model::{
    AssetBinding, ConstraintKind, CrossTreeConstraint, Feature, FeatureId, FeatureModel, Group, GroupKind, Layer,
    ModelBuilder, ModelError, Variability,
};
pub use solver::EXACT_BOUND;
pub use version::{filter_by_version, VersionError};
pub use encode::validate;
