//! Shared experiment plumbing: oracle risks of fitted hypotheses and the
//! standard Rademacher ingredients fed into bound evaluations.
//!
//! Held-out risk is computed from the generative conditionals (exact clipped
//! Gaussian expectations), not from a sample split, so validation measures
//! the bound against the true gap rather than against test-set noise.

use seqbound_core::bounds::Ingredient;
use seqbound_core::complexity::{contraction_constant, linear_rademacher_bound};
use seqbound_core::error::Result;
use seqbound_core::hypotheses::{BoundedLoss, ClipStats, HypothesisClass};
use seqbound_core::panel::{Example, TimeSeriesPanel};
use seqbound_core::partitions::Partition;
use seqbound_core::processes::ArSampler;

/// Mean over series of the exact conditional risk of predicting the next
/// value with `class(params)` applied to the realized history.
pub fn oracle_risk(
    sampler: &ArSampler,
    panel: &TimeSeriesPanel,
    class: &HypothesisClass,
    params: &[f64],
    loss: &BoundedLoss,
) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..panel.m() {
        let row = panel.row(i);
        let pred = class.predict(params, row)?;
        let mu = sampler.conditional_mean(i, row);
        acc += loss.expected_gaussian(pred, mu, sampler.conditional_std(i));
    }
    Ok(acc / panel.m() as f64)
}

/// Per-series oracle risk for a family of local hypotheses (one parameter
/// vector per series).
pub fn oracle_risk_local(
    sampler: &ArSampler,
    panel: &TimeSeriesPanel,
    class: &HypothesisClass,
    per_series_params: &[Vec<f64>],
    loss: &BoundedLoss,
) -> Result<f64> {
    let mut acc = 0.0;
    for (i, params) in per_series_params.iter().enumerate() {
        let row = panel.row(i);
        let pred = class.predict(params, row)?;
        let mu = sampler.conditional_mean(i, row);
        acc += loss.expected_gaussian(pred, mu, sampler.conditional_std(i));
    }
    Ok(acc / panel.m() as f64)
}

/// Closed-form Rademacher ingredient for the independent-series bound:
/// linear hypothesis bound on the whole example set times the loss
/// contraction constant.
pub fn rademacher_ingredient_whole(
    examples: &[Example],
    lambda_cap: f64,
    class: &HypothesisClass,
    loss: &BoundedLoss,
) -> Result<Ingredient> {
    let base = linear_rademacher_bound(lambda_cap, examples)?;
    let lip = contraction_constant(loss, class, examples);
    Ok(Ingredient::new(
        base.value * lip,
        "linear_closed_form_times_contraction",
    ))
}

/// Max over partition collections of the closed-form Rademacher bound on
/// that collection's examples (times contraction). Tangent collections
/// share the observed marginals, so the data radius is taken from the
/// observed rows; the provenance records that.
pub fn rademacher_ingredient_partition(
    examples: &[Example],
    partition: &Partition,
    lambda_cap: f64,
    class: &HypothesisClass,
    loss: &BoundedLoss,
) -> Result<Ingredient> {
    let mut worst: f64 = 0.0;
    for set in partition.index_sets() {
        let subset: Vec<Example> = set.iter().map(|&i| examples[i].clone()).collect();
        let base = linear_rademacher_bound(lambda_cap, &subset)?;
        let lip = contraction_constant(loss, class, &subset);
        worst = worst.max(base.value * lip);
    }
    Ok(Ingredient::new(
        worst,
        "max_collection_linear_closed_form_on_observed",
    ))
}

/// Empirical loss plus clip accounting, convenience re-export shape.
pub fn empirical_risk(
    examples: &[Example],
    class: &HypothesisClass,
    params: &[f64],
    loss: &BoundedLoss,
) -> Result<(f64, ClipStats)> {
    seqbound_core::hypotheses::erm_risk_with_clipstats(examples, class, params, loss)
}
