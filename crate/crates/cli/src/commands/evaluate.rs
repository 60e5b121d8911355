//! `evaluate-bounds`: assemble a bound report from explicit ingredient
//! values (the estimation commands produce those values; this command only
//! combines them, so provenance stays visible).

use crate::config::ExperimentConfig;
use crate::report::CommandOutput;
use anyhow::{anyhow, bail};
use seqbound_core::bounds::{self, BoundReport, HybridB1, HybridB2, Ingredient};

fn need<T: Copy>(v: Option<T>, name: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| anyhow!("config error: bound_inputs.{name} is required"))
}

pub fn evaluate(cfg: &ExperimentConfig) -> anyhow::Result<BoundReport> {
    let theorem = cfg
        .theorem
        .as_deref()
        .ok_or_else(|| anyhow!("config error: `theorem` is required"))?;
    let inputs = cfg.bound_inputs.clone().unwrap_or_default();
    let delta = cfg
        .delta
        .ok_or_else(|| anyhow!("config error: `delta` is required"))?;
    let loss_cap = inputs.loss_cap.unwrap_or(1.0);
    let ing = |v: Option<f64>, name: &str| -> anyhow::Result<Ingredient> {
        Ok(Ingredient::new(need(v, name)?, "input"))
    };
    let report = match theorem {
        "thm1_s2s" => {
            let sizes = inputs
                .partition_sizes
                .clone()
                .ok_or_else(|| anyhow!("config error: bound_inputs.partition_sizes required"))?;
            let betas = inputs
                .betas_per_collection
                .clone()
                .unwrap_or_else(|| vec![0.0; sizes.len()]);
            bounds::thm1_s2s_bound(
                &ing(inputs.max_rademacher, "max_rademacher")?,
                &ing(inputs.discrepancy, "discrepancy")?,
                &sizes,
                &betas,
                delta,
                loss_cap,
            )?
        }
        "thm2_independent" => bounds::thm2_independent_bound(
            &ing(inputs.max_rademacher, "max_rademacher")?,
            &ing(inputs.discrepancy, "discrepancy")?,
            need(inputs.m, "m")?,
            delta,
            loss_cap,
        )?,
        "thm3_local" => bounds::thm3_local_bound(
            &ing(inputs.mean_local_discrepancy, "mean_local_discrepancy")?,
            cfg.alpha
                .ok_or_else(|| anyhow!("config error: `alpha` is required for thm3"))?,
            need(inputs.t_len, "t_len")?,
            need(inputs.m, "m")?,
            &ing(inputs.log_covering, "log_covering")?,
            delta,
            loss_cap,
        )?,
        "thm4_hybrid" => {
            let sizes = inputs
                .partition_sizes
                .clone()
                .ok_or_else(|| anyhow!("config error: bound_inputs.partition_sizes required"))?;
            let betas = inputs
                .betas_per_collection
                .clone()
                .unwrap_or_else(|| vec![0.0; sizes.len()]);
            let b1 = HybridB1 {
                mean_delta_t: ing(inputs.mean_delta_t, "mean_delta_t")?,
                max_rademacher: ing(inputs.max_rademacher, "max_rademacher")?,
                partition_sizes: sizes,
                betas_per_collection: betas,
                t_len: need(inputs.t_len, "t_len")?,
            };
            let b2 = HybridB2 {
                mean_local_disc: ing(inputs.mean_local_discrepancy, "mean_local_discrepancy")?,
                alpha: cfg
                    .alpha
                    .ok_or_else(|| anyhow!("config error: `alpha` is required for thm4"))?,
                t_len: need(inputs.t_len, "t_len")?,
                m: need(inputs.m, "m")?,
                max_log_covering: ing(inputs.log_covering, "log_covering")?,
            };
            bounds::thm4_hybrid_bound(&b1, &b2, delta, loss_cap)?
        }
        "prop2_delta_s" => bounds::prop2_delta_s_bound(
            &ing(inputs.discrepancy, "discrepancy")?,
            &ing(inputs.max_rademacher, "max_rademacher")?,
            need(inputs.min_collection_size, "min_collection_size")?,
            need(inputs.k, "k")?,
            inputs.bar_beta_mass.unwrap_or(0.0),
            delta,
            loss_cap,
        )?,
        other => bail!(
            "config error: unknown theorem '{other}' (expected one of thm1_s2s, \
             thm2_independent, thm3_local, thm4_hybrid, prop2_delta_s)"
        ),
    };
    Ok(report)
}

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    let report = evaluate(cfg)?;
    let violated = !report.valid;
    let mut out = CommandOutput::json(serde_json::to_value(&report)?);
    out.precondition_violated = violated;
    Ok(out)
}
