//! Report envelope and output writing. Every command's report embeds the
//! fully resolved configuration and the toolkit version, and everything is
//! rendered deterministically (sorted maps, shortest round-trip floats, no
//! timestamps), so equal configs produce byte-identical files.

use crate::config::{ExperimentConfig, OutputFormat};
use serde::Serialize;
use serde_json::Value;
use std::path::Path;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct ReportEnvelope<'a, T: Serialize> {
    pub toolkit_version: &'static str,
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub result: T,
}

/// Result payload of one command run.
pub struct CommandOutput {
    pub result: Value,
    /// Preferred CSV rendering when `--format csv` (row-shaped results).
    pub csv: Option<String>,
    /// Set when a theorem precondition failed (drives exit code 3 under
    /// `--strict`).
    pub precondition_violated: bool,
    /// Commands that write their primary artifact to `out` themselves
    /// (simulate) set this so the report goes to stdout instead.
    pub owns_out_path: bool,
}

impl CommandOutput {
    pub fn json(result: Value) -> Self {
        CommandOutput {
            result,
            csv: None,
            precondition_violated: false,
            owns_out_path: false,
        }
    }
}

/// Flatten a JSON value into `path,value` CSV lines; the generic fallback
/// for `--format csv` on non-tabular reports.
pub fn flatten_to_csv(value: &Value) -> String {
    let mut rows = Vec::new();
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, child, rows);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), child, rows);
                }
            }
            other => rows.push((prefix.to_string(), scalar_to_string(other))),
        }
    }
    walk("", value, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

fn scalar_to_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.replace(',', ";"),
        other => other.to_string(),
    }
}

/// Render the full report and write it (or print to stdout when no path is
/// configured).
pub fn emit(
    command: &str,
    config: &ExperimentConfig,
    output: &CommandOutput,
) -> Result<(), String> {
    let format = config.format.unwrap_or(OutputFormat::Json);
    let body = match format {
        OutputFormat::Json => {
            let envelope = ReportEnvelope {
                toolkit_version: TOOLKIT_VERSION,
                command,
                config,
                result: &output.result,
            };
            let mut s = serde_json::to_string_pretty(&envelope)
                .map_err(|e| format!("report serialization failed: {e}"))?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => output
            .csv
            .clone()
            .unwrap_or_else(|| flatten_to_csv(&output.result)),
    };
    match (&config.out, output.owns_out_path) {
        (Some(path), false) => std::fs::write(Path::new(path), body)
            .map_err(|e| format!("cannot write report to {path}: {e}")),
        _ => {
            print!("{body}");
            Ok(())
        }
    }
}

/// Full-precision float for CSV cells (round-trip exact).
pub fn fmt_f64(v: f64) -> String {
    seqbound_core::panel::format_f64(v)
}
