use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Tsv,
    Text,
}

/// One command result. JSON is canonical; the text form is derived from it unless a
/// command has a native text form (the coefficient file of `build`).
pub struct Output {
    pub json: Value,
    pub tsv: String,
    pub text: Option<String>,
}

impl Output {
    pub fn new<T: Serialize>(body: &T, tsv: String) -> CliResult<Self> {
        let json = serde_json::to_value(body).map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(Output { json, tsv, text: None })
    }

    /// Renders the output. `elapsed_ms` goes into the JSON object, or to stderr for the
    /// other formats, so the canonical body never changes between runs.
    pub fn render(mut self, format: Format, elapsed_ms: Option<u64>) -> String {
        match format {
            Format::Json => {
                if let Some(ms) = elapsed_ms {
                    if let Value::Object(map) = &mut self.json {
                        map.insert("elapsed_ms".into(), ms.into());
                    } else {
                        self.json = serde_json::json!({ "result": self.json, "elapsed_ms": ms });
                    }
                }
                let mut s = serde_json::to_string_pretty(&self.json).expect("values always serialize");
                s.push('\n');
                s
            }
            Format::Tsv => {
                if let Some(ms) = elapsed_ms {
                    eprintln!("elapsed_ms\t{ms}");
                }
                self.tsv
            }
            Format::Text => {
                if let Some(ms) = elapsed_ms {
                    eprintln!("elapsed_ms: {ms}");
                }
                self.text.unwrap_or_else(|| text_from_json(&self.json))
            }
        }
    }
}

pub fn write_out(rendered: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = stdout.write_all(rendered.as_bytes());
            let _ = stdout.flush();
            Ok(())
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object()) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        _ => None,
    }
}

/// Indented `key: value` listing of a JSON value.
pub fn text_from_json(v: &Value) -> String {
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

fn walk(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match scalar(item) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        walk(item, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                match scalar(item) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}[{i}]");
                        walk(item, depth + 1, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_listing_nests_objects() {
        let v = json!({"a": 1, "b": {"c": [1, 2], "d": null}, "e": [{"f": "x"}]});
        assert_eq!(text_from_json(&v), "a: 1\nb:\n  c: [1, 2]\n  d: -\ne:\n  [0]\n    f: x\n");
    }

    #[test]
    fn timing_is_appended_to_json_only() {
        let out = Output::new(&json!({"k": 1}), "k\n".into()).unwrap();
        let s = out.render(Format::Json, Some(7));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["elapsed_ms"], 7);
        let out = Output::new(&json!({"k": 1}), "k\n".into()).unwrap();
        assert_eq!(out.render(Format::Tsv, Some(7)), "k\n");
    }
}
