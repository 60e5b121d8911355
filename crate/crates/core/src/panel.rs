//! Multi-series panel data and the three dataset splits.
//!
//! A panel holds `m` series of common length `T`. Three training-set splits
//! are supported:
//!
//! - sequence-to-sequence: one example per series, mapping the length-(T-1)
//!   prefix to the final value;
//! - local: per-series sliding lag-`p` windows;
//! - hybrid: the local windows of all series pooled into one set.
//!
//! Time indices at the public interface are 1-based. A local window of
//! length `p` predicting the value at time `t` must lie fully inside
//! `[1, T]`, so each series yields exactly `T - p` local examples.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Immutable m x T observation matrix with per-series identifiers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesPanel {
    values: Vec<Vec<f64>>,
    series_ids: Vec<String>,
    /// Optional per-series integer start times (periodic processes).
    phase: Option<Vec<i64>>,
}

/// A single supervised example drawn from a panel split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub input: Vec<f64>,
    pub target: f64,
    pub series_index: usize,
    /// 1-based time index of the target value.
    pub time_index: usize,
}

impl TimeSeriesPanel {
    pub fn new(
        values: Vec<Vec<f64>>,
        series_ids: Vec<String>,
        phase: Option<Vec<i64>>,
    ) -> Result<Self> {
        let m = values.len();
        if m < 1 {
            return Err(CoreError::InvariantViolation("panel requires m >= 1".into()));
        }
        let t = values[0].len();
        if t < 2 {
            return Err(CoreError::InvariantViolation("panel requires T >= 2".into()));
        }
        if values.iter().any(|row| row.len() != t) {
            return Err(CoreError::InvariantViolation(
                "all series must have the same length".into(),
            ));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CoreError::InvariantViolation(
                "panel values must be finite".into(),
            ));
        }
        if series_ids.len() != m {
            return Err(CoreError::InvariantViolation(
                "series_ids length must equal m".into(),
            ));
        }
        let mut sorted = series_ids.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoreError::InvariantViolation(
                "series_ids must be distinct".into(),
            ));
        }
        if let Some(ph) = &phase {
            if ph.len() != m {
                return Err(CoreError::InvariantViolation(
                    "phase length must equal m".into(),
                ));
            }
        }
        Ok(TimeSeriesPanel {
            values,
            series_ids,
            phase,
        })
    }

    /// Convenience constructor with ids "s0".."s{m-1}".
    pub fn from_values(values: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..values.len()).map(|i| format!("s{i}")).collect();
        TimeSeriesPanel::new(values, ids, None)
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Series length T.
    pub fn t_len(&self) -> usize {
        self.values[0].len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn series_ids(&self) -> &[String] {
        &self.series_ids
    }

    pub fn phase(&self) -> Option<&[i64]> {
        self.phase.as_deref()
    }

    /// The sub-sequence (Y_a(i), ..., Y_b(i)), 1-based, inclusive.
    pub fn window(&self, i: usize, a: usize, b: usize) -> Result<&[f64]> {
        if i >= self.m() {
            return Err(CoreError::IndexOutOfRange(format!(
                "series index {i} >= m = {}",
                self.m()
            )));
        }
        if a < 1 || a > b || b > self.t_len() {
            return Err(CoreError::IndexOutOfRange(format!(
                "window [{a}, {b}] outside [1, {}]",
                self.t_len()
            )));
        }
        Ok(&self.values[i][a - 1..b])
    }

    /// One example per series: input Y_1^{T-1}(i), target Y_T(i).
    pub fn seq2seq_examples(&self) -> Vec<Example> {
        let t = self.t_len();
        (0..self.m())
            .map(|i| Example {
                input: self.values[i][..t - 1].to_vec(),
                target: self.values[i][t - 1],
                series_index: i,
                time_index: t,
            })
            .collect()
    }

    /// Sliding lag-`p` windows of series `i`: inputs Y_{t-p}^{t-1}(i),
    /// targets Y_t(i), for t = p+1 ... T (exactly T - p examples).
    pub fn local_examples(&self, i: usize, p: usize) -> Result<Vec<Example>> {
        if i >= self.m() {
            return Err(CoreError::IndexOutOfRange(format!(
                "series index {i} >= m = {}",
                self.m()
            )));
        }
        let t_len = self.t_len();
        if p < 1 || p >= t_len {
            return Err(CoreError::InvalidParameter(format!(
                "lag order p = {p} must satisfy 1 <= p < T = {t_len}"
            )));
        }
        Ok((p + 1..=t_len)
            .map(|t| Example {
                input: self.values[i][t - 1 - p..t - 1].to_vec(),
                target: self.values[i][t - 1],
                series_index: i,
                time_index: t,
            })
            .collect())
    }

    /// Local examples of every series pooled; length m * (T - p).
    pub fn hybrid_examples(&self, p: usize) -> Result<Vec<Example>> {
        let mut out = Vec::with_capacity(self.m() * (self.t_len() - p));
        for i in 0..self.m() {
            out.extend(self.local_examples(i, p)?);
        }
        Ok(out)
    }

    /// A copy with the final column removed (the panel Y').
    pub fn truncate_last(&self) -> Result<TimeSeriesPanel> {
        let t = self.t_len();
        if t < 3 {
            return Err(CoreError::InvalidParameter(
                "cannot truncate a panel of length 2".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .map(|row| row[..t - 1].to_vec())
            .collect();
        TimeSeriesPanel::new(values, self.series_ids.clone(), self.phase.clone())
    }

    /// CSV rendering: header `series_id,t1,...,tT`, one row per series.
    /// Values use shortest round-trip decimal form, so save/load is
    /// bit-exact.
    pub fn to_csv(&self) -> String {
        let t = self.t_len();
        let mut out = String::from("series_id");
        for k in 1..=t {
            out.push_str(&format!(",t{k}"));
        }
        out.push('\n');
        for (i, row) in self.values.iter().enumerate() {
            out.push_str(&self.series_ids[i]);
            for v in row {
                out.push(',');
                out.push_str(&format_f64(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CoreError::Parse("empty CSV".into()))?;
        if !header.starts_with("series_id,") {
            return Err(CoreError::Parse(
                "CSV header must start with 'series_id,'".into(),
            ));
        }
        let mut values = Vec::new();
        let mut ids = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let id = fields
                .next()
                .ok_or_else(|| CoreError::Parse("missing series id".into()))?;
            let row: Result<Vec<f64>> = fields
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| CoreError::Parse(format!("bad value '{f}': {e}")))
                })
                .collect();
            ids.push(id.to_string());
            values.push(row?);
        }
        TimeSeriesPanel::new(values, ids, None)
    }

    /// Write the panel CSV plus, when metadata is present, a
    /// `<path>.meta.json` sidecar `{"phase": [...], "process_spec": {...}}`.
    pub fn save(&self, path: &Path, process_spec: Option<&serde_json::Value>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        if self.phase.is_some() || process_spec.is_some() {
            let sidecar = PanelSidecar {
                phase: self.phase.clone(),
                process_spec: process_spec.cloned(),
            };
            let json = serde_json::to_string_pretty(&sidecar)?;
            std::fs::write(sidecar_path(path), json)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut panel = TimeSeriesPanel::from_csv(&text)?;
        let sc = sidecar_path(path);
        if sc.exists() {
            let sidecar: PanelSidecar = serde_json::from_str(&std::fs::read_to_string(sc)?)?;
            panel.phase = sidecar.phase;
        }
        Ok(panel)
    }
}

/// Sidecar JSON carried next to a panel CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PanelSidecar {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process_spec: Option<serde_json::Value>,
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".meta.json");
    std::path::PathBuf::from(os)
}

/// Shortest decimal rendering that parses back to the same f64.
pub fn format_f64(v: f64) -> String {
    let s = format!("{v}");
    debug_assert_eq!(s.parse::<f64>().unwrap(), v);
    s
}
