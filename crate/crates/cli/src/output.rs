//! Rendering of command results as JSON or CSV with a provenance header.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result in both renderings.
pub struct Report {
    pub command: &'static str,
    pub json: Value,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
    pub default_format: Format,
}

impl Report {
    pub fn new(command: &'static str, json: Value, default_format: Format) -> Report {
        Report { command, json, csv_header: Vec::new(), csv_rows: Vec::new(), default_format }
    }

    pub fn table<S: Into<String>>(mut self, header: impl IntoIterator<Item = S>, rows: Vec<Vec<String>>) -> Report {
        self.csv_header = header.into_iter().map(Into::into).collect();
        self.csv_rows = rows;
        self
    }

    /// JSON object `{command, seed, version, result}` or CSV whose first line
    /// is `# command=.. seed=.. version=..`.
    pub fn render(&self, format: Option<Format>, seed: u64) -> String {
        match format.unwrap_or(self.default_format) {
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "seed": seed,
                    "version": kcycle_core::VERSION,
                    "result": self.json,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!("# command={} seed={seed} version={}\n", self.command, kcycle_core::VERSION);
                if self.csv_header.is_empty() {
                    s.push_str("key,value\n");
                    if let Value::Object(map) = &self.json {
                        for (k, v) in map {
                            s.push_str(&format!("{k},{}\n", csv_cell(v)));
                        }
                    }
                    return s;
                }
                s.push_str(&self.csv_header.join(","));
                s.push('\n');
                for row in &self.csv_rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => {
            let s = other.to_string();
            if s.contains(',') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s
            }
        }
    }
}

pub fn write_output(text: &str, path: &Option<PathBuf>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing to standard output")?;
            out.flush().context("flushing standard output")
        }
    }
}

pub fn f(x: f64) -> String {
    format!("{x}")
}
