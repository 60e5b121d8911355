//! Data-mode (plug-in) estimators used by the advisor when no generative
//! spec is available. These replace conditional expectations with realized
//! losses: the last observed window plays the role of the horizon. Reports
//! that consume them must carry the `empirical_plug_in` provenance.

use seqbound_core::error::{CoreError, Result};
use seqbound_core::hypotheses::{BoundedLoss, HypothesisClass};
use seqbound_core::optim::{maximize, MemberSpace, OptBudget};
use seqbound_core::panel::TimeSeriesPanel;
use seqbound_core::partitions::Partition;
use seqbound_core::rng::derive_seed;

/// Plug-in local discrepancy of one series: the last local example acts as
/// the horizon, the earlier ones as the in-sample baseline.
pub fn empirical_local_discrepancy(
    panel: &TimeSeriesPanel,
    series_index: usize,
    class: &HypothesisClass,
    loss: &BoundedLoss,
    p: usize,
    budget: &OptBudget,
    seed: u64,
) -> Result<f64> {
    let examples = panel.local_examples(series_index, p)?;
    if examples.len() < 2 {
        return Err(CoreError::InvalidParameter(
            "plug-in local discrepancy needs at least 2 local examples".into(),
        ));
    }
    let (baseline, horizon) = examples.split_at(examples.len() - 1);
    let horizon = &horizon[0];
    let objective = |params: &[f64]| {
        let h_loss = loss.eval(
            class.predict(params, &horizon.input).expect("validated"),
            horizon.target,
        );
        let mut acc = 0.0;
        for ex in baseline {
            acc += loss.eval(
                class.predict(params, &ex.input).expect("validated"),
                ex.target,
            );
        }
        h_loss - acc / baseline.len() as f64
    };
    if matches!(class, HypothesisClass::Offset(_)) {
        let mut best = f64::NEG_INFINITY;
        for k in 0..=1000 {
            best = best.max(objective(&[k as f64 * 1e-3]));
        }
        return Ok(best);
    }
    let space = MemberSpace::single(class);
    Ok(maximize(&space, objective, budget, seed).value)
}

/// Panel mean of the plug-in local discrepancy.
pub fn empirical_mean_local_discrepancy(
    panel: &TimeSeriesPanel,
    class: &HypothesisClass,
    loss: &BoundedLoss,
    p: usize,
    budget: &OptBudget,
    seed: u64,
) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..panel.m() {
        acc += empirical_local_discrepancy(
            panel,
            i,
            class,
            loss,
            p,
            budget,
            derive_seed(seed, i as u64),
        )?;
    }
    Ok(acc / panel.m() as f64)
}

/// Plug-in per-time-step discrepancy: realized losses at 1-based time `t`
/// against realized losses at the final time step.
pub fn empirical_delta_t(
    panel: &TimeSeriesPanel,
    class: &HypothesisClass,
    loss: &BoundedLoss,
    t: usize,
    p: usize,
    budget: &OptBudget,
    seed: u64,
) -> Result<f64> {
    let t_len = panel.t_len();
    if t < p + 1 || t > t_len {
        return Err(CoreError::InvalidParameter(format!(
            "time index t = {t} outside [{}, {t_len}]",
            p + 1
        )));
    }
    let m = panel.m();
    let objective = |params: &[f64]| {
        let mut at_t = 0.0;
        let mut at_end = 0.0;
        for i in 0..m {
            let row = panel.row(i);
            let w_t = &row[t - 1 - p..t - 1];
            let w_end = &row[t_len - 1 - p..t_len - 1];
            at_t += loss.eval(
                class.predict(params, w_t).expect("validated"),
                row[t - 1],
            );
            at_end += loss.eval(
                class.predict(params, w_end).expect("validated"),
                row[t_len - 1],
            );
        }
        ((at_t - at_end) / m as f64).abs()
    };
    let space = MemberSpace::single(class);
    Ok(maximize(&space, objective, budget, seed).value)
}

/// Mean plug-in per-time-step discrepancy over admissible t.
pub fn empirical_mean_delta_t(
    panel: &TimeSeriesPanel,
    class: &HypothesisClass,
    loss: &BoundedLoss,
    p: usize,
    budget: &OptBudget,
    seed: u64,
) -> Result<f64> {
    let t_len = panel.t_len();
    let mut acc = 0.0;
    for t in p + 1..=t_len {
        acc += empirical_delta_t(panel, class, loss, t, p, budget, derive_seed(seed, t as u64))?;
    }
    Ok(acc / (t_len - p) as f64)
}

/// Plug-in per-collection mixing bounds from sample row correlations: each
/// pairwise Pearson correlation across time is fed into the analytic
/// closed form. Collections whose plug-in correlation reaches 0.5 are
/// flagged inapplicable (infinite value).
pub fn sample_correlation_betas(panel: &TimeSeriesPanel, partition: &Partition) -> Vec<f64> {
    let corr = |a: &[f64], b: &[f64]| -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        if saa == 0.0 || sbb == 0.0 {
            0.0
        } else {
            (sab / (saa * sbb).sqrt()).abs()
        }
    };
    partition
        .index_sets()
        .iter()
        .map(|set| {
            if set.len() < 2 {
                return 0.0;
            }
            let mut sigma0: f64 = 0.0;
            for (a, &i) in set.iter().enumerate() {
                for &j in &set[a + 1..] {
                    sigma0 = sigma0.max(corr(panel.row(i), panel.row(j)));
                }
            }
            if sigma0 >= 0.5 {
                f64::INFINITY
            } else {
                seqbound_core::mixing::analytic_beta_s2s(sigma0, sigma0).unwrap_or(f64::INFINITY)
            }
        })
        .collect()
}
