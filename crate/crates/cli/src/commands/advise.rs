//! `advise`: recommend a modeling methodology for a panel by evaluating the
//! sequence-to-sequence, local, and hybrid bounds with a shared confidence
//! level and picking the smallest valid one.
//!
//! In data mode (panel only) every input is data-computable: the symmetric
//! discrepancy by optimizer, plug-in local and per-time-step discrepancies,
//! closed-form complexities, and mixing plug-ins from sample row
//! correlations. In oracle mode (process spec available) the conditional
//! oracles replace the plug-ins. Every non-exact input is flagged in the
//! evidence map.

use crate::advisor::{recommend, AdvisorVerdict, Methodology};
use crate::config::ExperimentConfig;
use crate::estimators;
use crate::oracle;
use crate::report::CommandOutput;
use anyhow::Context;
use seqbound_core::bounds::{self, Ingredient};
use seqbound_core::complexity::linear_seq_covering_log;
use seqbound_core::discrepancy::{
    delta_e_mc, delta_oracle, delta_s, mean_delta_local, mean_delta_t, ConditionalEstimator,
};
use seqbound_core::hypotheses::HypothesisClass;
use seqbound_core::mixing::collection_beta;
use seqbound_core::optim::OptBudget;
use seqbound_core::panel::TimeSeriesPanel;
use seqbound_core::partitions::Partition;
use seqbound_core::processes::ProcessSpec;
use seqbound_core::rng::derive_seed;
use serde_json::json;
use std::collections::BTreeMap;

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    // a panel sidecar carrying the generating spec also enables oracle mode
    let process = crate::commands::estimate::resolve_process(cfg)?;
    let oracle_mode = process.is_some();
    let panel: TimeSeriesPanel = crate::commands::estimate::resolve_panel(cfg)?;
    let m = panel.m();
    let t_len = panel.t_len();
    let loss = cfg.loss_or_default();
    let lambda_cap = match &cfg.class {
        Some(HypothesisClass::Linear(l)) => l.lambda_cap,
        _ => 1.0,
    };
    let p = cfg.lag.unwrap_or_else(|| (t_len / 2).clamp(1, 4));
    let delta = cfg.delta.unwrap_or(0.1);
    let alpha = cfg.alpha.unwrap_or(1.0 / (t_len as f64).sqrt());
    let seed = cfg.seed_or_default();
    let budget = OptBudget::light();

    let s2s_class = HypothesisClass::linear(t_len - 1, lambda_cap);
    let local_class = HypothesisClass::linear(p, lambda_cap);
    let partition = match &cfg.partition {
        Some(pc) => pc.build(m)?,
        None => Partition::whole(m),
    };

    let mut evidence: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    evidence.insert("m".into(), json!(m));
    evidence.insert("t_len".into(), json!(t_len));
    evidence.insert("lag".into(), json!(p));
    evidence.insert(
        "mode".into(),
        json!(if oracle_mode { "oracle" } else { "data" }),
    );

    // the practitioner-facing signal: the data-computable symmetric
    // discrepancy, always reported
    let ds = delta_s(&panel, &s2s_class, &loss, &budget, derive_seed(seed, 1))?;
    evidence.insert("delta_s".into(), json!(ds.value));

    // discrepancy input of the s2s bound
    let (disc_ing, betas): (Ingredient, Vec<f64>) = if let Some(process) = &process {
        let disc = match process {
            ProcessSpec::ArCorrelated(ar) => {
                let v = delta_oracle(
                    process,
                    &panel,
                    &s2s_class,
                    &loss,
                    ConditionalEstimator::Exact,
                    &budget,
                    derive_seed(seed, 2),
                )?;
                evidence.insert("delta_oracle".into(), json!(v.value));
                let betas = collection_beta(&ar.noise_cov, &partition)?
                    .iter()
                    .map(|b| if b.applicable { b.value } else { f64::INFINITY })
                    .collect();
                (
                    Ingredient::new(v.value, "delta_oracle_optimizer_lower_bound"),
                    betas,
                )
            }
            ProcessSpec::Tent(_) => {
                let v = delta_e_mc(
                    process,
                    &s2s_class,
                    &loss,
                    cfg.n_trials.unwrap_or(500),
                    &budget,
                    derive_seed(seed, 2),
                )
                .context("tent expected-discrepancy estimation failed")?;
                evidence.insert("delta_e".into(), json!(v.value));
                // tent series are sampled independently across i
                (
                    Ingredient::new(v.value, "delta_e_monte_carlo"),
                    vec![0.0; partition.k()],
                )
            }
        };
        disc
    } else {
        let betas = estimators::sample_correlation_betas(&panel, &partition);
        evidence.insert(
            "betas_provenance".into(),
            json!("sample_correlation_plug_in"),
        );
        (
            Ingredient::new(ds.value, "delta_s_proxy_optimizer_lower_bound"),
            betas,
        )
    };

    let s2s_examples = panel.seq2seq_examples();
    let rad = oracle::rademacher_ingredient_partition(
        &s2s_examples,
        &partition,
        lambda_cap,
        &s2s_class,
        &loss,
    )?;
    let thm1 = bounds::thm1_s2s_bound(
        &rad,
        &disc_ing,
        &partition.sizes(),
        &betas,
        delta,
        loss.clip_cap,
    )?;

    // local bound
    let local_disc = if let Some(process) = &process {
        mean_delta_local(
            process,
            &panel,
            &local_class,
            &loss,
            p,
            &budget,
            derive_seed(seed, 3),
        )?
    } else {
        estimators::empirical_mean_local_discrepancy(
            &panel,
            &local_class,
            &loss,
            p,
            &budget,
            derive_seed(seed, 3),
        )?
    };
    evidence.insert("mean_local_discrepancy".into(), json!(local_disc));
    let local_prov = if oracle_mode {
        "mean_delta_local_oracle"
    } else {
        "empirical_plug_in"
    };
    let data_radius = panel
        .rows()
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |a, &v| a.max(v.abs()))
        * (p as f64).sqrt();
    let covering = linear_seq_covering_log(alpha, lambda_cap, data_radius, p, t_len)?;
    let local_ing = Ingredient::new(local_disc.max(0.0), local_prov);
    let covering_ing = Ingredient::new(covering.value, "surrogate_covering_growth");
    let thm3 = bounds::thm3_local_bound(
        &local_ing,
        alpha,
        t_len,
        m,
        &covering_ing,
        delta,
        loss.clip_cap,
    )?;

    // hybrid bound
    let mdt = if let Some(process) = &process {
        mean_delta_t(
            process,
            &panel,
            &local_class,
            &loss,
            p,
            &OptBudget::random_only(32),
            derive_seed(seed, 4),
        )?
    } else {
        estimators::empirical_mean_delta_t(
            &panel,
            &local_class,
            &loss,
            p,
            &OptBudget::random_only(32),
            derive_seed(seed, 4),
        )?
    };
    evidence.insert("mean_delta_t".into(), json!(mdt));
    let thm4 = bounds::thm4_hybrid_bound(
        &bounds::HybridB1 {
            mean_delta_t: Ingredient::new(
                mdt,
                if oracle_mode {
                    "mean_delta_t_oracle"
                } else {
                    "empirical_plug_in"
                },
            ),
            max_rademacher: rad.clone(),
            partition_sizes: partition.sizes(),
            betas_per_collection: betas.clone(),
            t_len,
        },
        &bounds::HybridB2 {
            mean_local_disc: local_ing,
            alpha,
            t_len,
            m,
            max_log_covering: covering_ing,
        },
        delta,
        loss.clip_cap,
    )?;

    evidence.insert(
        "bound_seq2seq".into(),
        json!({"value": thm1.value, "valid": thm1.valid}),
    );
    evidence.insert(
        "bound_local".into(),
        json!({"value": thm3.value, "valid": thm3.valid}),
    );
    evidence.insert(
        "bound_hybrid".into(),
        json!({"value": thm4.value, "valid": thm4.valid}),
    );

    let (recommendation, tie_break, all_invalid) = recommend(&[
        (Methodology::Seq2seq, &thm1),
        (Methodology::Local, &thm3),
        (Methodology::Hybrid, &thm4),
    ]);
    let verdict = AdvisorVerdict {
        recommendation,
        evidence,
        tie_break,
        all_bounds_invalid: all_invalid,
    };
    let mut out = CommandOutput::json(json!({
        "verdict": verdict,
        "reports": {
            "thm1_s2s": thm1,
            "thm3_local": thm3,
            "thm4_hybrid": thm4,
        },
    }));
    out.precondition_violated = all_invalid;
    Ok(out)
}
