//! Rendering records as plain text or as one JSON object per line.

use super::{Record, RunOutcome, SessionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

pub fn render_record(r: &Record, format: Format) -> String {
    match format {
        Format::Structured => serde_json::to_string(r).expect("records serialize"),
        Format::Text => {
            let mut out = match r.verdict {
                Some(kind) if r.detail.is_empty() => format!("{}: {} {kind}", r.line, r.command),
                Some(kind) => format!("{}: {} {kind} ({})", r.line, r.command, r.detail),
                None => format!("{}: {}", r.line, r.detail),
            };
            for line in &r.output {
                out.push_str("\n    ");
                out.push_str(line);
            }
            for c in &r.checks {
                match c.detail.is_empty() {
                    true => out.push_str(&format!("\n    {}: {}", c.label, c.verdict)),
                    false => out.push_str(&format!("\n    {}: {} ({})", c.label, c.verdict, c.detail)),
                }
                if let Some(t) = &c.trace {
                    out.push_str(&format!("\n    certificate: {}", serde_json::to_string(t).expect("verdicts serialize")));
                }
            }
            if let Some(t) = &r.trace {
                out.push_str(&format!("\n    certificate: {}", serde_json::to_string(t).expect("verdicts serialize")));
            }
            if let (Some(e), Some(met)) = (r.expect, r.expectation_met) {
                let status = if met { "met" } else { "NOT MET" };
                out.push_str(&format!("\n    expect {e}: {status}"));
            }
            out
        }
    }
}

pub fn render_error(e: &SessionError, format: Format) -> String {
    match format {
        Format::Structured => serde_json::json!({
            "error": { "line": e.line, "column": e.column, "message": e.message }
        })
        .to_string(),
        Format::Text => format!("error: {e}"),
    }
}

/// The whole run, one line (or block) per record, ending with the error if any.
pub fn render(outcome: &RunOutcome, format: Format) -> String {
    let mut out = String::new();
    for r in &outcome.records {
        out.push_str(&render_record(r, format));
        out.push('\n');
    }
    if let Some(e) = &outcome.error {
        out.push_str(&render_error(e, format));
        out.push('\n');
    }
    out
}
