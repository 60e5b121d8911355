//! `simulate`: draw a panel from the configured process spec and write the
//! CSV plus metadata sidecar.

use crate::config::ExperimentConfig;
use crate::report::CommandOutput;
use anyhow::{bail, Context};
use serde_json::json;
use std::path::Path;

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    let Some(process) = &cfg.process else {
        bail!("config error: `process` is required for simulate");
    };
    let process = match cfg.seed {
        Some(s) => process.with_seed(s),
        None => process.clone(),
    };
    let panel = process.simulate().context("simulation failed")?;
    let out = cfg.out.clone().unwrap_or_else(|| "panel.csv".to_string());
    let spec_json = serde_json::to_value(&process)?;
    panel
        .save(Path::new(&out), Some(&spec_json))
        .context("cannot write panel")?;
    Ok(CommandOutput {
        result: json!({
            "path": out,
            "m": panel.m(),
            "t_len": panel.t_len(),
            "has_phase": panel.phase().is_some(),
        }),
        csv: None,
        precondition_violated: false,
        owns_out_path: true,
    })
}
