use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic identifiers. The numeric part never changes meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DiagnosticCode {
    UnknownFeature,
    DuplicateFeature,
    Syntax,
    MultipleRoots,
    SelfReference,
    DuplicateDecision,
    Marker,
    Group,
    Version,
    Asset,
    DuplicateConstraint,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::UnknownFeature => "E001",
            DiagnosticCode::DuplicateFeature => "E002",
            DiagnosticCode::Syntax => "E003",
            DiagnosticCode::MultipleRoots => "E004",
            DiagnosticCode::SelfReference => "E005",
            DiagnosticCode::DuplicateDecision => "E006",
            DiagnosticCode::Marker => "E007",
            DiagnosticCode::Group => "E008",
            DiagnosticCode::Version => "E009",
            DiagnosticCode::Asset => "E010",
            DiagnosticCode::DuplicateConstraint => "W001",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SourceSpan {
    pub file: String,
    /// 1-based.
    pub line: u32,
    /// 1-based, counted in characters.
    pub column: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub span: SourceSpan,
    pub message: String,
    pub code: DiagnosticCode,
}

impl ParseDiagnostic {
    pub fn error(code: DiagnosticCode, span: SourceSpan, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, span, message: message.into(), code }
    }

    pub fn warning(code: DiagnosticCode, span: SourceSpan, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, span, message: message.into(), code }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}[{}]: {}", self.span, self.code, self.message)
    }
}

/// Renders diagnostics one per line.
pub fn render(diagnostics: &[ParseDiagnostic]) -> String {
    diagnostics.iter().map(|d| format!("{d}\n")).collect()
}
