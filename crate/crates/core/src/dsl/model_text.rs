//! Parser and serializer for `.fm` feature-model files.
//!
//! ```text
//! model       = "model" IDENT decl (constraint)* ;
//! decl        = marker? "feature" IDENT version? asset? block? ;
//! marker      = "mandatory" | "optional" ;
//! version     = "@v" INT ;
//! asset       = "=>" "module" STRING ("layer" LAYER ("," LAYER)*)? ;
//! block       = "{" (decl | group | constraint)* "}" ;
//! group       = ("alt" | "or") "group" IDENT "{" IDENT ("," IDENT)* "}" ;
//! constraint  = ("requires" | "excludes") IDENT IDENT NEWLINE ;
//! ```
//!
//! The root declaration and group members take no marker. A member may be
//! given its own declaration (version, asset, children) later in the block
//! that declares its group. An asset without a `layer` list covers all four
//! layers. `#` starts a comment that runs to the end of the line.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::diagnostic::{DiagnosticCode, ParseDiagnostic, SourceSpan};
use super::lexer::{tokenize, Tok, Token};
use crate::fm::{
    AssetBinding, ConstraintKind, FeatureId, FeatureModel, GroupKind, Layer, ModelBuilder, ModelError, Variability,
};

const RESERVED: &[&str] = &[
    "model", "feature", "mandatory", "optional", "alt", "or", "group", "requires", "excludes", "module", "layer",
];

/// Parses a model, reporting locations against `<input>`.
pub fn parse_model(text: &str) -> Result<FeatureModel, Vec<ParseDiagnostic>> {
    parse_model_named(text, "<input>")
}

/// Parses a model; `file` is only used for diagnostic spans.
pub fn parse_model_named(text: &str, file: &str) -> Result<FeatureModel, Vec<ParseDiagnostic>> {
    let (model, diagnostics) = parse_model_full(text, file);
    match model {
        Some(m) if !diagnostics.iter().any(ParseDiagnostic::is_error) => Ok(m),
        _ => Err(diagnostics),
    }
}

/// Parses a model and returns every diagnostic, warnings included. The model
/// is `None` whenever an error was reported.
pub fn parse_model_full(text: &str, file: &str) -> (Option<FeatureModel>, Vec<ParseDiagnostic>) {
    let tokens = match tokenize(text, file) {
        Ok(t) => t,
        Err(d) => return (None, vec![d]),
    };
    let mut p = Parser { tokens, pos: 0, file, builder: None, diagnostics: Vec::new(), constraints: Vec::new() };
    let parsed = p.parse_file();
    let mut diagnostics = p.diagnostics;
    if parsed.is_err() || diagnostics.iter().any(ParseDiagnostic::is_error) {
        return (None, diagnostics);
    }
    let mut builder = p.builder.expect("root parsed");
    let mut seen = HashSet::new();
    for (kind, from, to, span) in p.constraints {
        match builder.add_constraint(kind, &from, &to) {
            Ok(()) => {
                if !seen.insert((kind, from.clone(), to.clone())) {
                    diagnostics.push(ParseDiagnostic::warning(
                        DiagnosticCode::DuplicateConstraint,
                        span,
                        format!("duplicate constraint `{} {from} {to}`", kind.keyword()),
                    ));
                }
            }
            Err(e) => diagnostics.push(model_error(e, span)),
        }
    }
    if diagnostics.iter().any(ParseDiagnostic::is_error) {
        return (None, diagnostics);
    }
    match builder.build() {
        Ok(m) => (Some(m), diagnostics),
        Err(e) => {
            let span = SourceSpan { file: file.to_string(), line: 1, column: 1 };
            diagnostics.push(model_error(e, span));
            (None, diagnostics)
        }
    }
}

fn model_error(e: ModelError, span: SourceSpan) -> ParseDiagnostic {
    let code = match &e {
        ModelError::UnknownFeature(_) => DiagnosticCode::UnknownFeature,
        ModelError::DuplicateFeature(_) => DiagnosticCode::DuplicateFeature,
        ModelError::InvalidName(_) => DiagnosticCode::Syntax,
        ModelError::GroupTooSmall { .. } => DiagnosticCode::Group,
        ModelError::GroupMemberVariability(_) => DiagnosticCode::Marker,
        ModelError::SelfReference(_) => DiagnosticCode::SelfReference,
        ModelError::InvalidVersion { .. } => DiagnosticCode::Version,
        ModelError::EmptyModuleId(_) | ModelError::EmptyLayers(_) => DiagnosticCode::Asset,
    };
    ParseDiagnostic::error(code, span, e.to_string())
}

/// Unrecoverable syntax error; details are already in the diagnostics.
struct Stop;

type PResult<T> = Result<T, Stop>;

#[derive(Default)]
struct BlockState {
    /// Members of groups declared in this block, with whether they already
    /// received a declaration.
    members: Vec<(String, bool)>,
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    file: &'a str,
    builder: Option<ModelBuilder>,
    diagnostics: Vec<ParseDiagnostic>,
    constraints: Vec<(ConstraintKind, String, String, SourceSpan)>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        let t = &self.tokens[self.pos];
        SourceSpan { file: self.file.to_string(), line: t.line, column: t.column }
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn syntax<T>(&mut self, message: impl Into<String>) -> PResult<T> {
        let span = self.span();
        self.diagnostics.push(ParseDiagnostic::error(DiagnosticCode::Syntax, span, message));
        Err(Stop)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            let found = self.peek().describe();
            self.syntax(format!("expected `{kw}`, found {found}"))
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            let found = self.peek().describe();
            self.syntax(format!("expected {}, found {found}", tok.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.syntax(format!("expected {what}, found {}", other.describe())),
        }
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
    }

    fn error(&mut self, code: DiagnosticCode, span: SourceSpan, message: impl Into<String>) {
        self.diagnostics.push(ParseDiagnostic::error(code, span, message));
    }

    fn parse_file(&mut self) -> PResult<()> {
        self.skip_newlines();
        self.expect_keyword("model")?;
        let model_name = self.ident("model name")?;
        self.skip_newlines();
        self.parse_decl(None, &model_name, &mut BlockState::default())?;
        loop {
            self.skip_newlines();
            match self.peek().clone() {
                Tok::Eof => return Ok(()),
                Tok::Ident(s) if s == "requires" || s == "excludes" => self.parse_constraint()?,
                Tok::Ident(s) if s == "feature" || s == "mandatory" || s == "optional" => {
                    let span = self.span();
                    self.error(DiagnosticCode::MultipleRoots, span, "a model has exactly one root feature");
                    return Err(Stop);
                }
                other => return self.syntax(format!("unexpected {} after root feature", other.describe())),
            }
        }
    }

    /// `parent` is `None` for the root. Its flag is false when the parent
    /// failed to register; the declaration is then parsed but not added.
    fn parse_decl(&mut self, parent: Option<(&str, bool)>, model_name: &str, block: &mut BlockState) -> PResult<()> {
        let marker_span = self.span();
        let marker = match self.peek() {
            Tok::Ident(s) if s == "mandatory" => Some(Variability::Mandatory),
            Tok::Ident(s) if s == "optional" => Some(Variability::Optional),
            _ => None,
        };
        if marker.is_some() {
            self.bump();
        }
        self.expect_keyword("feature")?;
        let name_span = self.span();
        let name = self.ident("feature name")?;

        let alive = match parent {
            None => {
                if marker.is_some() {
                    self.error(DiagnosticCode::Marker, marker_span, "the root feature takes no marker");
                }
                match ModelBuilder::new(model_name, &name) {
                    Ok(b) => {
                        self.builder = Some(b);
                        true
                    }
                    Err(e) => {
                        self.diagnostics.push(model_error(e, name_span.clone()));
                        return Err(Stop);
                    }
                }
            }
            Some((_, false)) => false,
            Some((parent_name, true)) => {
                if let Some(entry) = block.members.iter_mut().find(|(m, _)| *m == name) {
                    if entry.1 {
                        self.error(
                            DiagnosticCode::DuplicateFeature,
                            name_span.clone(),
                            format!("group member `{name}` declared twice"),
                        );
                        false
                    } else {
                        entry.1 = true;
                        if marker.is_some() {
                            self.error(DiagnosticCode::Marker, marker_span, "group members take no marker");
                        }
                        true
                    }
                } else if let Some(variability) = marker {
                    let builder = self.builder.as_mut().expect("root parsed");
                    match builder.add_feature(parent_name, &name, variability) {
                        Ok(_) => true,
                        Err(e) => {
                            self.diagnostics.push(model_error(e, name_span.clone()));
                            false
                        }
                    }
                } else {
                    self.error(
                        DiagnosticCode::Marker,
                        name_span.clone(),
                        format!("feature `{name}` needs a `mandatory` or `optional` marker"),
                    );
                    false
                }
            }
        };

        if let Tok::Version(v) = self.peek().clone() {
            let span = self.span();
            self.bump();
            match v {
                Some(v) if alive => {
                    if let Err(e) = self.builder.as_mut().expect("root parsed").set_version(&name, v) {
                        self.diagnostics.push(model_error(e, span));
                    }
                }
                Some(_) => {}
                None => self.error(DiagnosticCode::Version, span, "version number out of range"),
            }
        }

        if *self.peek() == Tok::Arrow {
            let span = self.span();
            self.bump();
            let asset = self.parse_asset()?;
            if alive {
                if let Err(e) = self.builder.as_mut().expect("root parsed").set_asset(&name, asset) {
                    self.diagnostics.push(model_error(e, span));
                }
            }
        }

        if *self.peek() == Tok::LBrace {
            self.parse_block(&name, alive, model_name)?;
        }
        Ok(())
    }

    fn parse_asset(&mut self) -> PResult<AssetBinding> {
        self.expect_keyword("module")?;
        let module_id = match self.bump() {
            Tok::Str(s) => s,
            other => {
                self.pos -= 1;
                return self.syntax(format!("expected module string, found {}", other.describe()));
            }
        };
        if !self.is_keyword("layer") {
            return Ok(AssetBinding::full(module_id));
        }
        self.bump();
        let mut layers = Vec::new();
        loop {
            let span = self.span();
            match self.bump() {
                Tok::Ident(s) => match Layer::parse(&s) {
                    Some(l) => layers.push(l),
                    None => {
                        self.error(
                            DiagnosticCode::Asset,
                            span,
                            format!("unknown layer `{s}` (expected XHTML, Controller, Service or DAO)"),
                        );
                        return Err(Stop);
                    }
                },
                other => {
                    self.pos -= 1;
                    return self.syntax(format!("expected layer name, found {}", other.describe()));
                }
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(AssetBinding::new(module_id, layers))
    }

    fn parse_block(&mut self, parent: &str, alive: bool, model_name: &str) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        let mut block = BlockState::default();
        loop {
            self.skip_newlines();
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(());
                }
                Tok::Eof => return self.syntax(format!("unclosed block of feature `{parent}`")),
                Tok::Ident(s) if s == "alt" || s == "or" => self.parse_group(parent, alive, &mut block)?,
                Tok::Ident(s) if s == "requires" || s == "excludes" => self.parse_constraint()?,
                Tok::Ident(s) if s == "feature" || s == "mandatory" || s == "optional" => {
                    self.parse_decl(Some((parent, alive)), model_name, &mut block)?
                }
                other => return self.syntax(format!("unexpected {} in feature block", other.describe())),
            }
        }
    }

    fn parse_group(&mut self, parent: &str, alive: bool, block: &mut BlockState) -> PResult<()> {
        let span = self.span();
        let kind = match self.bump() {
            Tok::Ident(s) if s == "alt" => GroupKind::Alternative,
            _ => GroupKind::Or,
        };
        self.expect_keyword("group")?;
        let name = self.ident("group name")?;
        self.expect(Tok::LBrace)?;
        let mut members = Vec::new();
        loop {
            self.skip_newlines();
            members.push(self.ident("group member")?);
            self.skip_newlines();
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                other => {
                    let found = other.describe();
                    return self.syntax(format!("expected `,` or `}}` in group, found {found}"));
                }
            }
        }
        if !alive {
            return Ok(());
        }
        let refs: Vec<&str> = members.iter().map(String::as_str).collect();
        match self.builder.as_mut().expect("root parsed").add_group(parent, &name, kind, &refs) {
            Ok(()) => block.members.extend(members.into_iter().map(|m| (m, false))),
            Err(e) => self.diagnostics.push(model_error(e, span)),
        }
        Ok(())
    }

    fn parse_constraint(&mut self) -> PResult<()> {
        let span = self.span();
        let kind = match self.bump() {
            Tok::Ident(s) if s == "requires" => ConstraintKind::Requires,
            _ => ConstraintKind::Excludes,
        };
        let from = self.ident("feature name")?;
        let to = self.ident("feature name")?;
        match self.peek() {
            Tok::Newline | Tok::Eof | Tok::RBrace => {}
            other => {
                let found = other.describe();
                return self.syntax(format!("constraint must end at the line break, found {found}"));
            }
        }
        if from == to {
            self.error(
                DiagnosticCode::SelfReference,
                span,
                format!("constraint on `{from}` references the feature itself"),
            );
        } else {
            self.constraints.push((kind, from, to, span));
        }
        Ok(())
    }
}

/// Canonical text: two-space indentation, children in declaration order,
/// constraints last in sorted order.
pub fn serialize_model(model: &FeatureModel) -> String {
    let mut out = format!("model {}\n", model.name());
    write_feature(model, model.root(), None, 0, &mut out);
    for c in model.constraints() {
        let _ = writeln!(out, "{} {} {}", c.kind.keyword(), model.name_of(c.from), model.name_of(c.to));
    }
    out
}

fn write_header(model: &FeatureModel, id: FeatureId, marker: Option<&str>, out: &mut String) {
    let f = model.feature(id);
    if let Some(m) = marker {
        out.push_str(m);
        out.push(' ');
    }
    out.push_str("feature ");
    out.push_str(&f.name);
    if f.version != 1 {
        let _ = write!(out, " @v{}", f.version);
    }
    if let Some(a) = &f.asset {
        let escaped = a.module_id.replace('\\', "\\\\").replace('"', "\\\"");
        let layers: Vec<&str> = a.layers.iter().map(|l| l.as_str()).collect();
        let _ = write!(out, " => module \"{escaped}\" layer {}", layers.join(","));
    }
}

fn write_feature(model: &FeatureModel, id: FeatureId, marker: Option<&str>, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    out.push_str(&indent);
    write_header(model, id, marker, out);
    let f = model.feature(id);
    if f.children.is_empty() {
        out.push('\n');
        return;
    }
    out.push_str(" {\n");
    let inner = "  ".repeat(depth + 1);
    let mut emitted_groups = HashSet::new();
    for &child in &f.children {
        let c = model.feature(child);
        match c.variability {
            Variability::GroupMember => {
                let group = model.group_of(child).expect("member has a group");
                if !emitted_groups.insert(group.name.clone()) {
                    continue;
                }
                let kw = match group.kind {
                    GroupKind::Alternative => "alt",
                    GroupKind::Or => "or",
                };
                let names: Vec<&str> = group.members.iter().map(|&m| model.name_of(m)).collect();
                let _ = writeln!(out, "{inner}{kw} group {} {{ {} }}", group.name, names.join(", "));
                for &m in &group.members {
                    let mf = model.feature(m);
                    if mf.version != 1 || mf.asset.is_some() || !mf.children.is_empty() {
                        write_feature(model, m, None, depth + 1, out);
                    }
                }
            }
            Variability::Mandatory => write_feature(model, child, Some("mandatory"), depth + 1, out),
            Variability::Optional => write_feature(model, child, Some("optional"), depth + 1, out),
        }
    }
    out.push_str(&indent);
    out.push_str("}\n");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(text: &str) -> Vec<(DiagnosticCode, u32)> {
        parse_model(text).unwrap_err().iter().map(|d| (d.code, d.span.line)).collect()
    }

    #[test]
    fn root_only() {
        let m = parse_model("model M\nfeature M_Root {}").unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.name(), "M");
        assert_eq!(serialize_model(&m), "model M\nfeature M_Root\n");
    }

    #[test]
    fn unknown_feature_in_constraint() {
        let text = "model M\nfeature A {\n  optional feature C\n}\nrequires A B\n";
        assert_eq!(codes(text), vec![(DiagnosticCode::UnknownFeature, 5)]);
    }

    #[test]
    fn each_error_has_its_code() {
        assert_eq!(codes("model M\nfeature A\nfeature B\n"), vec![(DiagnosticCode::MultipleRoots, 3)]);
        assert_eq!(
            codes("model M\nfeature A {\n optional feature B\n optional feature B\n}"),
            vec![(DiagnosticCode::DuplicateFeature, 4)]
        );
        assert_eq!(codes("model M\nfeature A {\n optional feature B\n}\nrequires B B"), vec![(DiagnosticCode::SelfReference, 5)]);
        assert_eq!(codes("model M\nfeature A {\n feature B\n}"), vec![(DiagnosticCode::Marker, 3)]);
        assert_eq!(codes("model M\nfeature A {\n alt group G { X }\n}"), vec![(DiagnosticCode::Group, 3)]);
        assert_eq!(codes("model M\nfeature A @v0"), vec![(DiagnosticCode::Version, 2)]);
        assert_eq!(codes("model M\nfeature A => module \"a\" layer View"), vec![(DiagnosticCode::Asset, 2)]);
        assert_eq!(codes("model M\nfeature A {"), vec![(DiagnosticCode::Syntax, 2)]);
        assert_eq!(codes("model M\nfeature A {\n or group G { X, Y }\n mandatory feature X\n}"), vec![(DiagnosticCode::Marker, 4)]);
        assert_eq!(codes("model M\nfeature A {\n optional feature B\n}\nrequires A B C\n"), vec![(DiagnosticCode::Syntax, 5)]);
    }

    #[test]
    fn semantic_errors_accumulate() {
        let text = "model M\nfeature A {\n optional feature B\n optional feature B\n feature C\n}\nrequires A Z\n";
        let got = codes(text);
        assert_eq!(got, vec![(DiagnosticCode::DuplicateFeature, 4), (DiagnosticCode::Marker, 5)]);
    }

    #[test]
    fn duplicate_constraint_is_a_warning() {
        let text = "model M\nfeature A {\n optional feature B\n}\nrequires B A\nrequires B A\n";
        let (m, diags) = parse_model_full(text, "x.fm");
        assert!(m.is_some());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code.as_str(), "W001");
        assert_eq!(m.unwrap().constraints().len(), 1);
    }

    #[test]
    fn group_members_with_declarations() {
        let text = "model M\nfeature R {\n  alt group G { X, Y }\n  feature Y @v2 {\n    optional feature Y1\n  }\n}\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.groups()[0].kind, GroupKind::Alternative);
        let y = m.find("Y").unwrap();
        assert_eq!(m.feature(y).version, 2);
        assert_eq!(serialize_model(&m), text);
    }

    #[test]
    fn asset_without_layers_covers_all() {
        let m = parse_model("model M\nfeature R => module \"r\"").unwrap();
        assert_eq!(m.feature(m.root()).asset, Some(AssetBinding::full("r")));
        assert_eq!(serialize_model(&m), "model M\nfeature R => module \"r\" layer XHTML,Controller,Service,DAO\n");
    }

    #[test]
    fn string_escapes_round_trip() {
        let m = parse_model("model M\nfeature R => module \"a\\\"b\\\\c\" layer DAO").unwrap();
        assert_eq!(m.feature(m.root()).asset.as_ref().unwrap().module_id, "a\"b\\c");
        assert_eq!(parse_model(&serialize_model(&m)).unwrap(), m);
    }
}
