//! `tent-example`: the periodic-tent demonstration that the
//! sequence-to-sequence and local discrepancies can each be negligible while
//! the other stays bounded away from zero.
//!
//! Two setups are run:
//!
//! - two-point phase (start at 0 or T/2 on a period-T tent): the expected
//!   s2s discrepancy of a last-value linear class is O(1/T), while the
//!   per-series local discrepancy of the offset class stays at scale b/T
//!   times T-independent constants for the half of the series whose horizon
//!   step breaks the in-sample pattern;
//! - drift (rising ramp, half of a period-2T tent): the local discrepancy
//!   of the offset class is exactly zero (every increment matches), while
//!   the full-window linear class sees an O(1) s2s discrepancy from the
//!   level shift between the two window positions.
//!
//! The hypothesis classes differ per setup: each claim quantifies over a
//! different class, and no single class exhibits both regimes. The fixture
//! values were frozen after calibrating against the brute-force grid
//! oracle.

use crate::config::{ExperimentConfig, TentExampleConfig};
use crate::report::{fmt_f64, CommandOutput};
use anyhow::Context;
use seqbound_core::discrepancy::{delta_e_mc, mean_delta_local};
use seqbound_core::hypotheses::{BoundedLoss, HypothesisClass};
use seqbound_core::optim::OptBudget;
use seqbound_core::processes::{ProcessSpec, TentPhaseMode, TentSpec};
use seqbound_core::rng::derive_seed;
use serde::Serialize;
use serde_json::json;

#[derive(Clone, Debug, Serialize)]
pub struct TentSetupRow {
    pub setup: String,
    pub s2s_class: HypothesisClass,
    pub s2s_delta_e: f64,
    pub s2s_delta_e_stderr: f64,
    pub mean_local_discrepancy: f64,
    pub s2s_discrepancy_nonzero: bool,
    pub local_discrepancy_nonzero: bool,
}

fn run_setup(
    label: &str,
    mode: TentPhaseMode,
    s2s_class: HypothesisClass,
    tent: &TentExampleConfig,
    seed: u64,
    budget: &OptBudget,
) -> anyhow::Result<TentSetupRow> {
    let loss = BoundedLoss::squared();
    let trial_spec = ProcessSpec::Tent(TentSpec {
        m: tent.trial_m,
        t_len: tent.t_len,
        b_range: (tent.b_lo, tent.b_hi),
        phase_mode: mode,
        seed: derive_seed(seed, 1),
    });
    let s2s = delta_e_mc(
        &trial_spec,
        &s2s_class,
        &loss,
        tent.n_trials,
        budget,
        derive_seed(seed, 2),
    )
    .context("s2s discrepancy estimation failed")?;

    let local_spec = ProcessSpec::Tent(TentSpec {
        m: tent.m_local,
        t_len: tent.t_len,
        b_range: (tent.b_lo, tent.b_hi),
        phase_mode: mode,
        seed: derive_seed(seed, 3),
    });
    let panel = local_spec.simulate()?;
    let local = mean_delta_local(
        &local_spec,
        &panel,
        &HypothesisClass::offset(),
        &loss,
        1,
        &OptBudget::light(),
        derive_seed(seed, 4),
    )?;

    Ok(TentSetupRow {
        setup: label.to_string(),
        s2s_class,
        s2s_delta_e: s2s.value,
        s2s_delta_e_stderr: s2s.stderr.unwrap_or(0.0),
        mean_local_discrepancy: local,
        s2s_discrepancy_nonzero: s2s.value > 0.05,
        local_discrepancy_nonzero: local > 0.05,
    })
}

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    let tent = cfg.tent.clone().unwrap_or_default();
    let seed = cfg.seed_or_default();
    let budget = cfg.budget();
    let two_point = run_setup(
        "two_point",
        TentPhaseMode::TwoPoint,
        HypothesisClass::linear(1, tent.two_point_cap),
        &tent,
        derive_seed(seed, 10),
        &budget,
    )?;
    let drift = run_setup(
        "drift",
        TentPhaseMode::DriftHalfPeriod,
        HypothesisClass::linear(tent.t_len - 1, tent.drift_cap),
        &tent,
        derive_seed(seed, 20),
        &budget,
    )?;

    let mut csv =
        String::from("setup,s2s_delta_e,s2s_stderr,mean_local_discrepancy\n");
    for r in [&two_point, &drift] {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.setup,
            fmt_f64(r.s2s_delta_e),
            fmt_f64(r.s2s_delta_e_stderr),
            fmt_f64(r.mean_local_discrepancy)
        ));
    }
    // regimes demonstrated: local >> s2s on two-point, s2s >> local on drift
    let regimes_flipped = two_point.mean_local_discrepancy > two_point.s2s_delta_e
        && drift.s2s_delta_e > drift.mean_local_discrepancy;
    let mut out = CommandOutput::json(json!({
        "rows": [two_point, drift],
        "regimes_flipped": regimes_flipped,
        "notes": [
            "local discrepancies use the offset class with a brute-force grid over c",
            "the s2s class differs per setup; each regime claim quantifies over its own class",
        ],
    }));
    out.csv = Some(csv);
    Ok(out)
}
