//! Splitting a script line into a command, positional words, `key=value`
//! arguments and a trailing `expect` directive.
//!
//! A value runs until the next whitespace-separated `key=` or `expect` at
//! bracket depth zero, so terms may contain spaces.

use super::SessionError;
use crate::zerocert::VerdictKind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub key: String,
    pub value: String,
    /// 1-based column of the first character of the value.
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandLine {
    pub line: usize,
    pub name: String,
    pub positional: Vec<(String, usize)>,
    pub args: Vec<Arg>,
    pub expect: Option<VerdictKind>,
}

impl CommandLine {
    pub fn error(&self, column: usize, message: impl Into<String>) -> SessionError {
        SessionError { line: self.line, column, message: message.into() }
    }
}

fn is_key_start(rest: &str) -> bool {
    let mut chars = rest.char_indices();
    match chars.next() {
        Some((_, c)) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for (_, c) in chars {
        if c == '=' {
            return true;
        }
        if !(c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return false;
        }
    }
    false
}

fn is_expect(rest: &str) -> bool {
    rest.strip_prefix("expect").is_some_and(|r| r.is_empty() || r.starts_with(char::is_whitespace))
}

/// Parses one line; `None` for blank and comment lines.
pub fn parse_line(line: usize, text: &str) -> Result<Option<CommandLine>, SessionError> {
    let text = match text.find('#') {
        Some(i) => &text[..i],
        None => text,
    };
    if text.trim().is_empty() {
        return Ok(None);
    }
    // Segment boundaries: byte offsets where a new word, key or directive starts.
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let bytes = text.as_bytes();
    let mut depth: i64 = 0;
    let mut start: Option<usize> = None;
    let mut in_value = false;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() && depth == 0 {
            let rest = text[i..].trim_start();
            let next = text.len() - rest.len();
            let boundary = rest.is_empty() || !in_value || is_key_start(rest) || is_expect(rest);
            if boundary {
                if let Some(s) = start.take() {
                    segments.push((s, i));
                }
                in_value = false;
            }
            i = next.max(i + 1);
            continue;
        }
        if start.is_none() {
            start = Some(i);
            in_value = is_key_start(&text[i..]);
        }
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(SessionError { line, column: i + 1, message: format!("unbalanced `{c}`") });
                }
            }
            _ => {}
        }
        i += 1;
    }
    if depth != 0 {
        return Err(SessionError { line, column: text.trim_end().len() + 1, message: "unclosed bracket".into() });
    }
    if let Some(s) = start {
        segments.push((s, text.trim_end().len()));
    }
    let mut words = segments.into_iter().map(|(s, e)| (text[s..e].trim_end(), s + 1));
    let (name, _) = words.next().expect("nonblank line has a first word");
    let mut cmd = CommandLine { line, name: name.to_string(), positional: Vec::new(), args: Vec::new(), expect: None };
    let mut words = words.peekable();
    while let Some((word, column)) = words.next() {
        if word == "expect" {
            let (kind, col) = words
                .next()
                .ok_or_else(|| SessionError { line, column, message: "expect needs PROVED, REFUTED or UNKNOWN".into() })?;
            cmd.expect = Some(match kind {
                "PROVED" => VerdictKind::Proved,
                "REFUTED" => VerdictKind::Refuted,
                "UNKNOWN" => VerdictKind::Unknown,
                other => return Err(SessionError { line, column: col, message: format!("unknown verdict `{other}`") }),
            });
            if let Some((_, col)) = words.next() {
                return Err(SessionError { line, column: col, message: "nothing may follow the expect directive".into() });
            }
        } else if is_key_start(word) {
            let (key, value) = word.split_once('=').expect("key has =");
            if cmd.args.iter().any(|a| a.key == key) {
                return Err(SessionError { line, column, message: format!("duplicate argument `{key}`") });
            }
            cmd.args.push(Arg { key: key.to_string(), value: value.trim().to_string(), column: column + key.len() + 1 });
        } else if cmd.args.is_empty() {
            cmd.positional.push((word.to_string(), column));
        } else {
            return Err(SessionError { line, column, message: format!("unexpected `{word}`") });
        }
    }
    Ok(Some(cmd))
}

/// Items of a `[a; b; c]` list with their columns; `value_column` is the
/// column of the opening bracket.
pub fn split_list(value: &str, value_column: usize) -> Option<Vec<(String, usize)>> {
    let inner = value.strip_prefix('[')?.strip_suffix(']')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    let mut depth = 0i64;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ';' if depth == 0 => {
                out.push(item(inner, start, i, value_column));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(item(inner, start, inner.len(), value_column));
    Some(out)
}

fn item(inner: &str, start: usize, end: usize, value_column: usize) -> (String, usize) {
    let raw = &inner[start..end];
    let lead = raw.len() - raw.trim_start().len();
    (raw.trim().to_string(), value_column + 1 + start + lead)
}
