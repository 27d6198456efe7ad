//! Command implementations. Each returns an [`Outcome`] instead of printing
//! so the binary, the service tests and the acceptance suite share one path.

use std::path::{Path, PathBuf};

use globset::Glob;
use serde::Serialize;
use splforge_core::derive::{derive_product, write_manifest, DeriveError};
use splforge_core::dsl::{parse_configuration_named, parse_model_full, render, serialize_model};
use splforge_core::fm::{
    count as count_products, diagnostics, enumerate as enumerate_products, filter_by_version, propagate as propagate_decisions,
    validate as validate_config, AnalysisError, ConfigError, Configuration, FeatureModel, PropagationResult, VersionError,
    Violation,
};
use splforge_core::metrics::{
    compare as compare_reports, measure as measure_corpus, read_report, render_key_values, render_table, write_report,
    MeasureOptions, MetricsReport,
};

pub const EXIT_OK: i32 = 0;
/// Invalid configuration, void model, cycles, conflicts.
pub const EXIT_FAILURE: i32 = 1;
/// Bad arguments, unreadable files, parse errors.
pub const EXIT_USAGE: i32 = 2;

/// Exit code plus what goes to stdout (payload) and stderr (diagnostics).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: impl Into<String>) -> Self {
        Self { code: EXIT_OK, stdout: stdout.into(), stderr: String::new() }
    }

    fn usage(stderr: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, stdout: String::new(), stderr: line(stderr.into()) }
    }

    fn failure(stdout: impl Into<String>, stderr: impl Into<String>) -> Self {
        Self { code: EXIT_FAILURE, stdout: stdout.into(), stderr: line(stderr.into()) }
    }

    fn with_notes(mut self, notes: &str) -> Self {
        self.stderr.insert_str(0, notes);
        self
    }
}

fn line(mut s: String) -> String {
    if !s.is_empty() && !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome::usage(format!("cannot read {}: {e}", path.display())))
}

/// A parsed model plus any warnings to pass on.
pub struct Loaded {
    pub model: FeatureModel,
    pub warnings: String,
}

pub fn load_model(path: &Path) -> Result<Loaded, Outcome> {
    let text = read(path)?;
    let (model, diags) = parse_model_full(&text, &path.display().to_string());
    match model {
        Some(model) => Ok(Loaded { model, warnings: render(&diags) }),
        None => Err(Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: render(&diags) }),
    }
}

fn load_config(path: &Path, model: &FeatureModel) -> Result<Configuration, Outcome> {
    let text = read(path)?;
    parse_configuration_named(&text, model, &path.display().to_string())
        .map_err(|d| Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: render(&d) })
}

fn at_version(model: FeatureModel, version: Option<u32>) -> Result<FeatureModel, Outcome> {
    match version {
        None => Ok(model),
        Some(v) => filter_by_version(&model, v).map_err(|e| match e {
            VersionError::InvalidVersion => Outcome::usage(e.to_string()),
            VersionError::RootRemoved { .. } => Outcome::failure("", e.to_string()),
        }),
    }
}

fn analysis_failure(e: AnalysisError) -> Outcome {
    match e {
        AnalysisError::Config(c) => Outcome::usage(c.to_string()),
        AnalysisError::ExactBoundExceeded { .. } => Outcome::failure("", e.to_string()),
    }
}

/// Outcome of checking a configuration, shared with the HTTP service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// Features the configuration leaves open; non-empty means not valid.
    pub undecided: Vec<String>,
    /// The decisions made so far already rule out every product.
    pub conflict: bool,
}

pub fn validation_report(model: &FeatureModel, config: &Configuration) -> Result<ValidationReport, ConfigError> {
    match validate_config(model, config) {
        Ok(r) => Ok(ValidationReport { valid: r.valid, conflict: !r.valid, violations: r.violations, undecided: Vec::new() }),
        Err(ConfigError::NotTotal(undecided)) => {
            let conflict = propagate_decisions(model, config)?.conflict;
            Ok(ValidationReport { valid: false, violations: Vec::new(), undecided, conflict })
        }
        Err(e) => Err(e),
    }
}

pub fn validate(model_path: &Path, config_path: &Path) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let Loaded { model, warnings } = load_model(model_path)?;
        let config = load_config(config_path, &model)?;
        let report = validation_report(&model, &config).map_err(|e| Outcome::usage(e.to_string()))?;
        if report.valid {
            return Ok(Outcome::ok("valid\n").with_notes(&warnings));
        }
        let mut out = String::from("invalid\n");
        if !report.undecided.is_empty() {
            out.push_str(&format!("undecided: {}\n", report.undecided.join(",")));
            if report.conflict {
                out.push_str("conflict: no valid product extends these decisions\n");
            }
        }
        for v in &report.violations {
            out.push_str(&format!("{v}\n"));
        }
        Ok(Outcome { code: EXIT_FAILURE, stdout: out, stderr: warnings })
    };
    run().unwrap_or_else(|o| o)
}

pub fn count(model_path: &Path, version: Option<u32>) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let Loaded { model, warnings } = load_model(model_path)?;
        let model = at_version(model, version)?;
        let n = count_products(&model).map_err(analysis_failure)?;
        let out = format!("{n}\n");
        Ok(if n == 0 { Outcome::failure(out, "model is void") } else { Outcome::ok(out) }.with_notes(&warnings))
    };
    run().unwrap_or_else(|o| o)
}

/// One product per line: its selected features, comma-separated.
pub fn enumerate(model_path: &Path, version: Option<u32>, limit: Option<usize>) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let Loaded { model, warnings } = load_model(model_path)?;
        let model = at_version(model, version)?;
        let products = enumerate_products(&model, limit).map_err(analysis_failure)?;
        let out: String = products
            .iter()
            .map(|p| format!("{}\n", p.selected.iter().cloned().collect::<Vec<_>>().join(",")))
            .collect();
        Ok(if products.is_empty() && limit != Some(0) {
            Outcome::failure(out, "model is void")
        } else {
            Outcome::ok(out)
        }
        .with_notes(&warnings))
    };
    run().unwrap_or_else(|o| o)
}

/// Forced decisions in `.cfg` syntax, then the open features as a comment.
pub fn render_propagation(result: &PropagationResult) -> String {
    if result.conflict {
        return "conflict\n".to_string();
    }
    let mut out = String::new();
    for n in &result.forced_selected {
        out.push_str(&format!("+{n}\n"));
    }
    for n in &result.forced_deselected {
        out.push_str(&format!("-{n}\n"));
    }
    if !result.open_features.is_empty() {
        out.push_str(&format!("# open: {}\n", result.open_features.iter().cloned().collect::<Vec<_>>().join(",")));
    }
    out
}

pub fn propagate(model_path: &Path, config_path: &Path) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let Loaded { model, warnings } = load_model(model_path)?;
        let config = load_config(config_path, &model)?;
        let result = propagate_decisions(&model, &config).map_err(|e| Outcome::usage(e.to_string()))?;
        let out = render_propagation(&result);
        Ok(if result.conflict {
            Outcome::failure(out, "the decisions admit no valid product")
        } else {
            Outcome::ok(out)
        }
        .with_notes(&warnings))
    };
    run().unwrap_or_else(|o| o)
}

pub fn derive(
    model_path: &Path,
    config_path: &Path,
    version: Option<u32>,
    name: Option<&str>,
    output: Option<&Path>,
) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let Loaded { model, warnings } = load_model(model_path)?;
        let config = load_config(config_path, &model)?;
        let version = version.unwrap_or_else(|| model.max_version());
        let default_name = config_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let name = name.unwrap_or(&default_name);
        let (manifest, failure) = match derive_product(&model, &config, name, version) {
            Ok(m) => (m, None),
            Err(DeriveError::Cycle { manifest, cycles }) => {
                let list: Vec<String> = cycles.iter().map(|c| c.join(" -> ")).collect();
                (*manifest, Some(format!("module cycles: {}", list.join("; "))))
            }
            Err(DeriveError::Version(VersionError::InvalidVersion)) => {
                return Err(Outcome::usage(VersionError::InvalidVersion.to_string()))
            }
            Err(e) => return Err(Outcome::failure("", e.to_string()).with_notes(&warnings)),
        };
        let text = write_manifest(&manifest);
        let stdout = match output {
            Some(path) => {
                write(path, &text)?;
                String::new()
            }
            None => text,
        };
        Ok(match failure {
            Some(msg) => Outcome::failure(stdout, msg),
            None => Outcome::ok(stdout),
        }
        .with_notes(&warnings))
    };
    run().unwrap_or_else(|o| o)
}

/// Void, dead, core and false-optional features plus the product count.
pub fn analyze(model_path: &Path, version: Option<u32>) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let Loaded { model, warnings } = load_model(model_path)?;
        let model = at_version(model, version)?;
        let d = diagnostics(&model).map_err(analysis_failure)?;
        let line = |key: &str, s: &std::collections::BTreeSet<String>| {
            let names = s.iter().cloned().collect::<Vec<_>>().join(",");
            if names.is_empty() { format!("{key}:\n") } else { format!("{key}: {names}\n") }
        };
        let out = format!(
            "products: {}\nvoid: {}\n{}{}{}",
            d.product_count,
            d.void,
            line("core", &d.core_features),
            line("dead", &d.dead_features),
            line("false-optional", &d.false_optional)
        );
        Ok(if d.void { Outcome::failure(out, "model is void") } else { Outcome::ok(out) }.with_notes(&warnings))
    };
    run().unwrap_or_else(|o| o)
}

/// Prints the canonical form of a model.
pub fn fmt(model_path: &Path) -> Outcome {
    match load_model(model_path) {
        Ok(Loaded { model, warnings }) => Outcome::ok(serialize_model(&model)).with_notes(&warnings),
        Err(o) => o,
    }
}

fn write(path: &Path, text: &str) -> Result<(), Outcome> {
    std::fs::write(path, text).map_err(|e| Outcome::usage(format!("cannot write {}: {e}", path.display())))
}

/// Source files under `dir` matching `glob`, as `/`-separated relative paths.
pub fn collect_sources(dir: &Path, glob: &str) -> Result<Vec<(String, Vec<u8>)>, Outcome> {
    if !dir.is_dir() {
        return Err(Outcome::usage(format!("{} is not a directory", dir.display())));
    }
    let matcher = Glob::new(glob).map_err(|e| Outcome::usage(format!("invalid glob: {e}")))?.compile_matcher();
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| Outcome::usage(e.to_string()))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel: PathBuf = entry.path().strip_prefix(dir).expect("walked under dir").to_path_buf();
        let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        if matcher.is_match(&rel) {
            let bytes = std::fs::read(entry.path()).map_err(|e| Outcome::usage(format!("cannot read {rel}: {e}")))?;
            files.push((rel, bytes));
        }
    }
    Ok(files)
}

pub fn measure(dir: &Path, glob: &str, options: &MeasureOptions, output: Option<&Path>) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let files = collect_sources(dir, glob)?;
        let report = measure_corpus(&files, options).map_err(|e| Outcome::usage(e.to_string()))?;
        let text = write_report(&report);
        match output {
            Some(p) => {
                write(p, &text)?;
                Ok(Outcome::ok(""))
            }
            None => Ok(Outcome::ok(text)),
        }
    };
    run().unwrap_or_else(|o| o)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompareFormat {
    #[default]
    Table,
    KeyValue,
}

fn load_report(path: &Path) -> Result<MetricsReport, Outcome> {
    let text = read(path)?;
    read_report(&text).map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))
}

pub fn compare(baseline: &Path, spl: &Path, derived: &Path, format: CompareFormat, output: Option<&Path>) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let report = compare_reports(&load_report(baseline)?, &load_report(spl)?, &load_report(derived)?);
        let text = match format {
            CompareFormat::Table => render_table(&report),
            CompareFormat::KeyValue => render_key_values(&report),
        };
        match output {
            Some(p) => {
                write(p, &text)?;
                Ok(Outcome::ok(""))
            }
            None => Ok(Outcome::ok(text)),
        }
    };
    run().unwrap_or_else(|o| o)
}
