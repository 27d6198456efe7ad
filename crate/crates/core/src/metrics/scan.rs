//! Line classification and per-function measurements for `.gsrc` sources.
//!
//! The language is a generic curly-brace syntax: `//` and `/* */` comments,
//! `"` and `'` quoted strings that end at the line break, `package a.b` on
//! the first code line, `import a.b.C` lines, and functions opened by
//! `function NAME(` whose bodies are delimited by brace balancing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionMetric {
    pub name: String,
    pub start_line: usize,
    /// Code lines from the signature to the closing brace.
    pub effective_lines: usize,
    /// 1 + decision points.
    pub complexity: usize,
    /// Brace depth below the function body.
    pub max_nesting: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceUnit {
    pub path: String,
    pub package_name: String,
    pub imports: Vec<String>,
    pub physical_lines: usize,
    pub code_lines: usize,
    pub comment_lines: usize,
    pub blank_lines: usize,
    pub functions: Vec<FunctionMetric>,
    /// Line of every TODO / FIXME marker found in comments.
    pub todo_lines: Vec<usize>,
}

impl SourceUnit {
    /// Sum of function complexities.
    pub fn complexity(&self) -> usize {
        self.functions.iter().map(|f| f.complexity).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: input is not valid UTF-8")]
pub struct NonUtf8Input {
    pub path: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Blank,
    Comment,
    Code,
}

/// One physical line split into its code and comment parts. String literal
/// contents are blanked out of `code`.
#[derive(Debug, Clone)]
pub(crate) struct SplitLine<'a> {
    pub raw: &'a str,
    pub code: String,
    pub comment: String,
    pub kind: LineKind,
}

pub(crate) fn split_lines(text: &str) -> Vec<SplitLine<'_>> {
    let mut in_block = false;
    let mut out = Vec::new();
    for raw in text.lines() {
        let chars: Vec<char> = raw.chars().collect();
        let mut code = String::new();
        let mut comment = String::new();
        let mut touched_comment = in_block;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let next = chars.get(i + 1).copied();
            if in_block {
                if c == '*' && next == Some('/') {
                    in_block = false;
                    i += 2;
                } else {
                    comment.push(c);
                    i += 1;
                }
                continue;
            }
            match (c, next) {
                ('/', Some('/')) => {
                    touched_comment = true;
                    comment.extend(&chars[i + 2..]);
                    break;
                }
                ('/', Some('*')) => {
                    touched_comment = true;
                    in_block = true;
                    i += 2;
                }
                ('"', _) | ('\'', _) => {
                    code.push(c);
                    i += 1;
                    while i < chars.len() {
                        match chars[i] {
                            '\\' => i += 2,
                            q if q == c => break,
                            _ => i += 1,
                        }
                    }
                    if i < chars.len() {
                        code.push(c);
                        i += 1;
                    }
                }
                _ => {
                    code.push(c);
                    i += 1;
                }
            }
        }
        let kind = if !code.trim().is_empty() {
            LineKind::Code
        } else if touched_comment {
            LineKind::Comment
        } else {
            LineKind::Blank
        };
        out.push(SplitLine { raw, code, comment, kind });
    }
    out
}

#[derive(Debug, PartialEq, Eq)]
enum Event {
    FunctionStart(String),
    Open,
    Close,
    Semicolon,
    Decision,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

const DECISION_WORDS: [&str; 5] = ["if", "for", "while", "case", "catch"];

fn events(code: &str) -> Vec<Event> {
    let chars: Vec<char> = code.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if DECISION_WORDS.contains(&word.as_str()) {
                out.push(Event::Decision);
            } else if word == "function" {
                let mut j = i;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                let name_start = j;
                while j < chars.len() && is_word_char(chars[j]) {
                    j += 1;
                }
                let name: String = chars[name_start..j].iter().collect();
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                if j > name_start && name_start > i && chars.get(j) == Some(&'(') {
                    out.push(Event::FunctionStart(name));
                    i = j;
                }
            }
            continue;
        }
        match (c, chars.get(i + 1)) {
            ('&', Some('&')) | ('|', Some('|')) => {
                out.push(Event::Decision);
                i += 2;
                continue;
            }
            ('?', _) => out.push(Event::Decision),
            ('{', _) => out.push(Event::Open),
            ('}', _) => out.push(Event::Close),
            (';', _) => out.push(Event::Semicolon),
            _ => {}
        }
        i += 1;
    }
    out
}

struct Frame {
    name: String,
    start_line: usize,
    body_depth: usize,
    deepest: usize,
    decisions: usize,
}

fn strip_statement(s: &str, keyword: &str) -> Option<String> {
    let rest = s.trim().strip_prefix(keyword)?;
    if !rest.starts_with(char::is_whitespace) {
        return None;
    }
    let name = rest.trim().trim_end_matches(';').trim();
    (!name.is_empty()).then(|| name.to_string())
}

fn count_markers(comment: &str) -> usize {
    comment.matches("TODO").count() + comment.matches("FIXME").count()
}

/// Measures one source file.
pub fn scan_file(bytes: &[u8], path: &str) -> Result<SourceUnit, NonUtf8Input> {
    let text = std::str::from_utf8(bytes).map_err(|_| NonUtf8Input { path: path.to_string() })?;
    Ok(scan_text(text, path))
}

pub fn scan_text(text: &str, path: &str) -> SourceUnit {
    let lines = split_lines(text);
    let mut unit = SourceUnit {
        path: path.to_string(),
        package_name: String::new(),
        imports: Vec::new(),
        physical_lines: lines.len(),
        code_lines: 0,
        comment_lines: 0,
        blank_lines: 0,
        functions: Vec::new(),
        todo_lines: Vec::new(),
    };
    let mut seen_code = false;
    let mut depth = 0usize;
    let mut frames: Vec<Frame> = Vec::new();
    let mut pending: Option<(String, usize)> = None;
    // (function, end line) in closing order
    let mut closed: Vec<(Frame, usize)> = Vec::new();

    for (idx, line) in lines.iter().enumerate() {
        let line_no = idx + 1;
        match line.kind {
            LineKind::Blank => unit.blank_lines += 1,
            LineKind::Comment => unit.comment_lines += 1,
            LineKind::Code => unit.code_lines += 1,
        }
        for _ in 0..count_markers(&line.comment) {
            unit.todo_lines.push(line_no);
        }
        if line.kind != LineKind::Code {
            continue;
        }
        if !seen_code {
            seen_code = true;
            if let Some(p) = strip_statement(&line.code, "package") {
                unit.package_name = p;
            }
        }
        if let Some(i) = strip_statement(&line.code, "import") {
            unit.imports.push(i);
        }
        for ev in events(&line.code) {
            match ev {
                Event::FunctionStart(name) => pending = Some((name, line_no)),
                Event::Semicolon => {
                    if frames.is_empty() || pending.is_some() {
                        pending = None;
                    }
                }
                Event::Open => {
                    depth += 1;
                    if let Some((name, start_line)) = pending.take() {
                        frames.push(Frame { name, start_line, body_depth: depth, deepest: depth, decisions: 0 });
                    }
                    for f in &mut frames {
                        f.deepest = f.deepest.max(depth);
                    }
                }
                Event::Close => {
                    if let Some(f) = frames.pop_if(|f| f.body_depth == depth) {
                        closed.push((f, line_no));
                    }
                    depth = depth.saturating_sub(1);
                }
                Event::Decision => {
                    if let Some(f) = frames.last_mut() {
                        f.decisions += 1;
                    }
                }
            }
        }
    }
    let last = lines.len();
    while let Some(f) = frames.pop() {
        closed.push((f, last));
    }
    closed.sort_by_key(|(f, _)| f.start_line);
    unit.functions = closed
        .into_iter()
        .map(|(f, end)| FunctionMetric {
            effective_lines: lines[f.start_line - 1..end].iter().filter(|l| l.kind == LineKind::Code).count(),
            complexity: 1 + f.decisions,
            max_nesting: f.deepest - f.body_depth,
            start_line: f.start_line,
            name: f.name,
        })
        .collect();
    unit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file() {
        let u = scan_text("", "e.gsrc");
        assert_eq!((u.physical_lines, u.code_lines, u.comment_lines, u.blank_lines), (0, 0, 0, 0));
        assert!(u.functions.is_empty());
    }

    #[test]
    fn if_and_logical_and_give_three() {
        let u = scan_text("function f(a, b) {\n  if (a && b) { return 1; }\n  return 0;\n}\n", "f.gsrc");
        assert_eq!(u.functions.len(), 1);
        assert_eq!(u.functions[0].complexity, 3);
        assert_eq!(u.functions[0].effective_lines, 4);
        assert_eq!(u.functions[0].max_nesting, 1);
    }

    #[test]
    fn tokens_in_strings_and_comments_ignored() {
        let u = scan_text("function g() { // if while\n  x = \"a && b ? c\"; /* for */\n}\n", "g.gsrc");
        assert_eq!(u.functions[0].complexity, 1);
        assert_eq!(u.code_lines, 3);
    }

    #[test]
    fn block_comment_lines_are_comments() {
        let u = scan_text("/*\n\n  doc\n*/\nx = 1;\n", "c.gsrc");
        assert_eq!((u.comment_lines, u.code_lines, u.blank_lines), (4, 1, 0));
    }

    #[test]
    fn brace_on_next_line_and_declarations() {
        let text = "function decl();\nfunction h(x)\n{\n  while (x) { x = x - 1; }\n}\n";
        let u = scan_text(text, "h.gsrc");
        assert_eq!(u.functions.len(), 1);
        assert_eq!(u.functions[0].name, "h");
        assert_eq!(u.functions[0].start_line, 2);
        assert_eq!(u.functions[0].complexity, 2);
    }

    #[test]
    fn nested_function_tokens_go_to_innermost() {
        let text = "function outer() {\n  if (a) {}\n  function inner() {\n    if (b) {}\n  }\n}\n";
        let u = scan_text(text, "n.gsrc");
        let c: Vec<(&str, usize)> = u.functions.iter().map(|f| (f.name.as_str(), f.complexity)).collect();
        assert_eq!(c, [("outer", 2), ("inner", 2)]);
    }

    #[test]
    fn package_only_from_first_code_line() {
        let u = scan_text("// header\npackage a.b;\nimport c.d;\n", "p.gsrc");
        assert_eq!(u.package_name, "a.b");
        assert_eq!(u.imports, ["c.d"]);
        let u = scan_text("x = 1;\npackage a.b;\n", "p.gsrc");
        assert_eq!(u.package_name, "");
    }

    #[test]
    fn non_utf8_rejected() {
        assert_eq!(scan_file(&[0xff, 0xfe], "bad.gsrc"), Err(NonUtf8Input { path: "bad.gsrc".into() }));
    }
}
