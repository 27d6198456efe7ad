//! Tokenizer for `.fm` model files.

use super::diagnostic::{DiagnosticCode, ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    /// `@vN`; `None` when the number does not fit.
    Version(Option<u32>),
    LBrace,
    RBrace,
    Comma,
    Arrow,
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Version(_) => "version tag".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: u32,
    pub column: u32,
}

pub(crate) fn tokenize(text: &str, file: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let span = |line, column| SourceSpan { file: file.to_string(), line, column };

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok| out.push(Token { tok, line: start_line, column: start_col });
        match c {
            '\n' => {
                push(Tok::Newline);
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            '\r' if chars.get(i + 1) == Some(&'\n') => {
                i += 1;
                col += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            '{' => push(Tok::LBrace),
            '}' => push(Tok::RBrace),
            ',' => push(Tok::Comma),
            '=' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::Arrow);
                i += 2;
                col += 2;
                continue;
            }
            '@' if chars.get(i + 1) == Some(&'v') => {
                let mut j = i + 2;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 2 {
                    return Err(ParseDiagnostic::error(
                        DiagnosticCode::Syntax,
                        span(line, col),
                        "expected digits after `@v`",
                    ));
                }
                let digits: String = chars[i + 2..j].iter().collect();
                push(Tok::Version(digits.parse().ok()));
                col += (j - i) as u32;
                i = j;
                continue;
            }
            '"' => {
                let mut j = i + 1;
                let mut s = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(ParseDiagnostic::error(
                                DiagnosticCode::Syntax,
                                span(line, col),
                                "unterminated string",
                            ))
                        }
                        Some('"') => break,
                        Some('\\') if matches!(chars.get(j + 1), Some('"') | Some('\\')) => {
                            s.push(chars[j + 1]);
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                push(Tok::Str(s));
                col += (j + 1 - i) as u32;
                i = j + 1;
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                push(Tok::Ident(chars[i..j].iter().collect()));
                col += (j - i) as u32;
                i = j;
                continue;
            }
            other => {
                return Err(ParseDiagnostic::error(
                    DiagnosticCode::Syntax,
                    span(line, col),
                    format!("unexpected character `{other}`"),
                ))
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}
