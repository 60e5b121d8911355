//! The three estimation subcommands: `estimate-discrepancy`,
//! `estimate-mixing`, and `estimate-complexity`. Each selects an estimator
//! through the config's `estimator` key and reports the estimate with its
//! provenance fields.

use crate::config::ExperimentConfig;
use crate::report::CommandOutput;
use anyhow::{anyhow, bail, Context};
use seqbound_core::complexity;
use seqbound_core::discrepancy::{self, ConditionalEstimator};
use seqbound_core::hypotheses::HypothesisClass;
use seqbound_core::mixing;
use seqbound_core::panel::TimeSeriesPanel;
use seqbound_core::processes::{ArSampler, ProcessSpec};
use serde_json::json;
use std::path::Path;

/// Load the panel named in the config, or simulate it from the process spec.
pub fn resolve_panel(cfg: &ExperimentConfig) -> anyhow::Result<TimeSeriesPanel> {
    if let Some(path) = &cfg.panel {
        return TimeSeriesPanel::load(Path::new(path))
            .with_context(|| format!("cannot load panel {path}"));
    }
    if let Some(process) = &cfg.process {
        let process = match cfg.seed {
            Some(s) => process.with_seed(s),
            None => process.clone(),
        };
        return process.simulate().context("simulation failed");
    }
    bail!("config error: either `panel` or `process` is required");
}

/// The generative spec for oracle-mode estimators: the config's `process`
/// key, or the spec recorded in a loaded panel's metadata sidecar.
pub fn resolve_process(cfg: &ExperimentConfig) -> anyhow::Result<Option<ProcessSpec>> {
    if let Some(p) = &cfg.process {
        return Ok(Some(p.clone()));
    }
    if let Some(path) = &cfg.panel {
        let sc = seqbound_core::panel::sidecar_path(Path::new(path));
        if sc.exists() {
            let sidecar: seqbound_core::panel::PanelSidecar =
                serde_json::from_str(&std::fs::read_to_string(&sc)?)
                    .with_context(|| format!("invalid sidecar {}", sc.display()))?;
            if let Some(spec_json) = sidecar.process_spec {
                let spec: ProcessSpec = serde_json::from_value(spec_json)
                    .context("sidecar process_spec does not describe a known generator")?;
                return Ok(Some(spec));
            }
        }
    }
    Ok(None)
}

fn require_process(cfg: &ExperimentConfig, what: &str) -> anyhow::Result<ProcessSpec> {
    resolve_process(cfg)?.ok_or_else(|| {
        anyhow!("config error: {what} requires `process` (or a panel sidecar carrying one)")
    })
}

fn require_class(cfg: &ExperimentConfig) -> anyhow::Result<HypothesisClass> {
    cfg.class
        .clone()
        .ok_or_else(|| anyhow!("config error: `class` is required"))
}

pub fn run_discrepancy(cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    let estimator = cfg.estimator.as_deref().unwrap_or("delta_s");
    let loss = cfg.loss_or_default();
    let budget = cfg.budget();
    let seed = cfg.seed_or_default();
    let est = match estimator {
        "delta_s" => {
            let panel = resolve_panel(cfg)?;
            discrepancy::delta_s(&panel, &require_class(cfg)?, &loss, &budget, seed)?
        }
        "delta_s_exact" => {
            let panel = resolve_panel(cfg)?;
            let class = require_class(cfg)?;
            let HypothesisClass::Linear(lin) = &class else {
                bail!("config error: delta_s_exact requires a linear class");
            };
            discrepancy::delta_s_linear_exact(&panel, lin.lambda_cap, lin.window, &loss)?
        }
        "delta_e" => {
            let process = require_process(cfg, "delta_e")?;
            discrepancy::delta_e_mc(
                &process,
                &require_class(cfg)?,
                &loss,
                cfg.n_trials.unwrap_or(2000),
                &budget,
                seed,
            )?
        }
        "delta_oracle" => {
            let process = require_process(cfg, "delta_oracle")?;
            let panel = resolve_panel(cfg)?;
            let cond = match cfg.n_cond_samples {
                Some(n) => ConditionalEstimator::MonteCarlo(n),
                None => ConditionalEstimator::Exact,
            };
            discrepancy::delta_oracle(
                &process,
                &panel,
                &require_class(cfg)?,
                &loss,
                cond,
                &budget,
                seed,
            )?
        }
        "delta_local" => {
            let process = require_process(cfg, "delta_local")?;
            let panel = resolve_panel(cfg)?;
            let p = cfg
                .lag
                .ok_or_else(|| anyhow!("config error: delta_local requires `lag`"))?;
            discrepancy::delta_local(
                &process,
                &panel,
                cfg.series_index.unwrap_or(0),
                &require_class(cfg)?,
                &loss,
                p,
                &budget,
                seed,
            )?
        }
        "delta_t" => {
            let process = require_process(cfg, "delta_t")?;
            let panel = resolve_panel(cfg)?;
            let p = cfg
                .lag
                .ok_or_else(|| anyhow!("config error: delta_t requires `lag`"))?;
            let t = cfg
                .time_index
                .ok_or_else(|| anyhow!("config error: delta_t requires `time_index`"))?;
            discrepancy::delta_t(
                &process,
                &panel,
                &require_class(cfg)?,
                &loss,
                t,
                p,
                &budget,
                seed,
            )?
        }
        other => bail!(
            "config error: unknown discrepancy estimator '{other}' (expected one of \
             delta_s, delta_s_exact, delta_e, delta_oracle, delta_local, delta_t)"
        ),
    };
    Ok(CommandOutput::json(serde_json::to_value(&est)?))
}

pub fn run_mixing(cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    let estimator = cfg.estimator.as_deref().unwrap_or("analytic");
    let result = match estimator {
        "analytic" => {
            let sigma = cfg
                .sigma
                .ok_or_else(|| anyhow!("config error: analytic mixing requires `sigma`"))?;
            let sigma0 = cfg.sigma0.unwrap_or(sigma);
            let pair = mixing::analytic_beta_pair(sigma, sigma0)?;
            json!({
                "kind": "analytic_lemma2",
                "sigma": sigma,
                "sigma0": sigma0,
                "statement_value": pair.statement_value,
                "proof_constant_value": pair.proof_value,
                "max_value": pair.max(),
            })
        }
        "numeric_tv" => {
            let sigma = cfg
                .sigma
                .ok_or_else(|| anyhow!("config error: numeric_tv requires `sigma`"))?;
            let est = mixing::numeric_tv_bivariate_gaussian(
                sigma,
                cfg.grid_halfwidth.unwrap_or(8.0),
                cfg.grid_step.unwrap_or(0.005),
            )?;
            serde_json::to_value(&est)?
        }
        "collection_beta" => {
            let process = require_process(cfg, "collection_beta")?;
            let ProcessSpec::ArCorrelated(ar) = &process else {
                bail!("config error: collection_beta requires an AR process");
            };
            let partition = cfg
                .partition
                .as_ref()
                .ok_or_else(|| anyhow!("config error: collection_beta requires `partition`"))?
                .build(ar.m)?;
            let betas = mixing::collection_beta(&ar.noise_cov, &partition)?;
            let all_applicable = betas.iter().all(|b| b.applicable);
            json!({
                "kind": "collection_beta",
                "k": partition.k(),
                "collections": betas,
                "all_applicable": all_applicable,
            })
        }
        "bar_beta" => {
            let process = require_process(cfg, "bar_beta")?;
            let ProcessSpec::ArCorrelated(ar) = &process else {
                bail!("config error: bar_beta requires an AR process");
            };
            let (i, j) = cfg
                .pair
                .ok_or_else(|| anyhow!("config error: bar_beta requires `pair`"))?;
            let sampler = ArSampler::new(ar)?;
            let sigma = ar.noise_correlation(i, j).abs();
            let sigma0 = cfg.sigma0.unwrap_or(sigma);
            let beta = mixing::analytic_beta_s2s(sigma, sigma0)?;
            let cov_term = mixing::conditional_mean_cov_mc(
                &sampler,
                i,
                j,
                cfg.n_histories.unwrap_or(2000),
                cfg.seed_or_default(),
            )?;
            json!({
                "kind": "bar_beta_upper",
                "pair": [i, j],
                "beta_s2s": beta,
                "cov_term": cov_term,
                "cov_term_provenance": "monte_carlo_conditional_mean_covariance",
                "value": mixing::bar_beta_upper(beta, cov_term)?,
            })
        }
        other => bail!(
            "config error: unknown mixing estimator '{other}' (expected one of \
             analytic, numeric_tv, collection_beta, bar_beta)"
        ),
    };
    Ok(CommandOutput::json(result))
}

pub fn run_complexity(cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    let estimator = cfg.estimator.as_deref().unwrap_or("linear_closed_form");
    let loss = cfg.loss_or_default();
    let examples_for = |cfg: &ExperimentConfig| -> anyhow::Result<Vec<seqbound_core::Example>> {
        let panel = resolve_panel(cfg)?;
        match (cfg.split_or_default(), cfg.lag) {
            ("seq2seq", _) => Ok(panel.seq2seq_examples()),
            ("local", Some(p)) => Ok(panel.local_examples(cfg.series_index.unwrap_or(0), p)?),
            ("hybrid", Some(p)) => Ok(panel.hybrid_examples(p)?),
            (split @ ("local" | "hybrid"), None) => {
                bail!("config error: split '{split}' requires `lag`")
            }
            (split, _) => bail!("config error: unknown split '{split}'"),
        }
    };
    let result = match estimator {
        "empirical" => {
            let class = require_class(cfg)?;
            let examples = examples_for(cfg)?;
            let est = complexity::empirical_rademacher(
                &examples,
                &class,
                &loss,
                cfg.n_sigma_draws.unwrap_or(64),
                &cfg.budget(),
                cfg.seed_or_default(),
            )?;
            serde_json::to_value(&est)?
        }
        "linear_closed_form" => {
            let class = require_class(cfg)?;
            let HypothesisClass::Linear(lin) = &class else {
                bail!("config error: linear_closed_form requires a linear class");
            };
            let examples = examples_for(cfg)?;
            let est = complexity::linear_rademacher_bound(lin.lambda_cap, &examples)?;
            let contraction = complexity::contraction_constant(&loss, &class, &examples);
            let composed = est.value * contraction;
            json!({
                "hypothesis_bound": est,
                "loss_contraction": contraction,
                "composed_bound": composed,
            })
        }
        "relu_closed_form" => {
            let class = require_class(cfg)?;
            let HypothesisClass::ReluNet(net) = &class else {
                bail!("config error: relu_closed_form requires a relu_net class");
            };
            let examples = examples_for(cfg)?;
            let est = complexity::relu_net_rademacher_bound(
                net.depth(),
                net.frobenius_product_cap,
                &examples,
            )?;
            let contraction = complexity::contraction_constant(&loss, &class, &examples);
            let composed = est.value * contraction;
            json!({
                "hypothesis_bound": est,
                "loss_contraction": contraction,
                "composed_bound": composed,
            })
        }
        "covering" => {
            let class = require_class(cfg)?;
            let HypothesisClass::Linear(lin) = &class else {
                bail!("config error: covering requires a linear class");
            };
            let panel = resolve_panel(cfg)?;
            let alpha = cfg.alpha.unwrap_or(1.0 / (panel.t_len() as f64).sqrt());
            let radius = panel
                .rows()
                .iter()
                .flat_map(|r| r.iter())
                .fold(0.0f64, |a, &v| a.max(v.abs()))
                * (lin.window as f64).sqrt();
            let est = complexity::linear_seq_covering_log(
                alpha,
                lin.lambda_cap,
                radius,
                lin.window,
                panel.t_len(),
            )?;
            json!({
                "estimate": est,
                "alpha": alpha,
                "data_radius": radius,
                "flags": ["surrogate_covering"],
            })
        }
        other => bail!(
            "config error: unknown complexity estimator '{other}' (expected one of \
             empirical, linear_closed_form, relu_closed_form, covering)"
        ),
    };
    Ok(CommandOutput::json(result))
}
