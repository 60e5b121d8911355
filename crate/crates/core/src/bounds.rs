//! Generalization-bound evaluators.
//!
//! Each evaluator assembles a bound value from ingredient estimates that
//! carry explicit provenance, so a single report can transparently mix
//! exact, surrogate, and Monte-Carlo inputs. Bounds are never silently
//! coerced: when a precondition fails (confidence level at or below the
//! mixing mass, loss cap different from 1) the report is marked invalid and
//! carries no value.
//!
//! The five shapes:
//!
//! - partition bound: `max_j R(C~_j) + Delta + sqrt(log(k / (delta -
//!   sum_j (|I_j|-1) beta_j)) / (2 min_j |I_j|))`;
//! - independent-series bound: `2 R_m + Delta + sqrt(log(1/delta) / m)`;
//! - local bound: `mean_i Delta(Z_i) + 2 alpha + sqrt((2/T) log(m N / delta))`;
//! - hybrid bound: `min(B1, B2)` with `B1` the per-time-step partition
//!   branch (2Tk log term, doubled mixing mass) and `B2` the local branch
//!   (doubled m);
//! - symmetric-discrepancy concentration: `Delta_e + R + sqrt(log(2k /
//!   (delta - bar-beta mass)) / (2c))`.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Which bound a report evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Thm1S2s,
    Thm2Independent,
    Thm3Local,
    Thm4Hybrid,
    Prop2DeltaS,
}

/// An input estimate with provenance (for example "exact_spectral",
/// "optimizer_lower_bound", "monte_carlo", "closed_form", "surrogate").
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ingredient {
    pub value: f64,
    pub provenance: String,
}

impl Ingredient {
    pub fn new(value: f64, provenance: impl Into<String>) -> Self {
        Ingredient {
            value,
            provenance: provenance.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermValue {
    pub value: f64,
    pub provenance: String,
}

/// Evaluated bound with its terms, validity, and provenance flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    /// Absent when the report is invalid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid_reason: Option<String>,
    /// Confidence level delta of the probabilistic statement.
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub terms: BTreeMap<String, TermValue>,
    pub flags: Vec<String>,
}

impl BoundReport {
    fn invalid(theorem: Theorem, delta: f64, reason: impl Into<String>) -> BoundReport {
        BoundReport {
            theorem,
            value: None,
            valid: false,
            invalid_reason: Some(reason.into()),
            delta,
            alpha: None,
            terms: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    fn push_term(&mut self, name: &str, value: f64, provenance: impl Into<String>) {
        self.terms.insert(
            name.to_string(),
            TermValue {
                value,
                provenance: provenance.into(),
            },
        );
    }

    /// Recompute the bound value from the stored terms map; used to verify
    /// that reports are self-describing.
    pub fn recompute_from_terms(&self) -> Option<f64> {
        if !self.valid {
            return None;
        }
        let get = |name: &str| self.terms.get(name).map(|t| t.value);
        match self.theorem {
            Theorem::Thm1S2s | Theorem::Thm2Independent => Some(
                get("rademacher_term")? + get("discrepancy")? + get("confidence_term")?,
            ),
            Theorem::Thm3Local => Some(
                get("mean_local_discrepancy")? + get("alpha_term")? + get("confidence_term")?,
            ),
            Theorem::Prop2DeltaS => Some(
                get("expected_discrepancy")? + get("rademacher_term")? + get("confidence_term")?,
            ),
            Theorem::Thm4Hybrid => {
                let b1 = get("b1");
                let b2 = get("b2");
                match (b1, b2) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (Some(a), None) => Some(a),
                    (None, Some(b)) => Some(b),
                    (None, None) => None,
                }
            }
        }
    }
}

/// Loss-cap precondition shared by every theorem here.
fn require_unit_loss_cap(theorem: Theorem, delta: f64, loss_cap: f64) -> Option<BoundReport> {
    if (loss_cap - 1.0).abs() > 1e-12 {
        return Some(BoundReport::invalid(
            theorem,
            delta,
            format!("loss cap must be 1, got {loss_cap}"),
        ));
    }
    None
}

/// Mixing mass `sum_j (|I_j| - 1) beta_j`.
pub fn beta_mass(partition_sizes: &[usize], betas_per_collection: &[f64]) -> Result<f64> {
    if partition_sizes.len() != betas_per_collection.len() {
        return Err(CoreError::InvalidParameter(
            "partition sizes and betas must align".into(),
        ));
    }
    Ok(partition_sizes
        .iter()
        .zip(betas_per_collection)
        .map(|(&s, &b)| (s as f64 - 1.0) * b)
        .sum())
}

/// Partition bound for sequence-to-sequence learning on dependent series.
pub fn thm1_s2s_bound(
    max_rademacher: &Ingredient,
    delta_disc: &Ingredient,
    partition_sizes: &[usize],
    betas_per_collection: &[f64],
    delta_conf: f64,
    loss_cap: f64,
) -> Result<BoundReport> {
    if let Some(bad) = require_unit_loss_cap(Theorem::Thm1S2s, delta_conf, loss_cap) {
        return Ok(bad);
    }
    if partition_sizes.is_empty() || partition_sizes.contains(&0) {
        return Err(CoreError::InvalidParameter(
            "partition sizes must be nonempty and positive".into(),
        ));
    }
    if !(0.0..1.0).contains(&delta_conf) || delta_conf == 0.0 {
        return Err(CoreError::InvalidParameter(
            "confidence level must lie in (0, 1)".into(),
        ));
    }
    let mass = beta_mass(partition_sizes, betas_per_collection)?;
    if !mass.is_finite() {
        return Ok(BoundReport::invalid(
            Theorem::Thm1S2s,
            delta_conf,
            "mixing bound inapplicable for some collection",
        ));
    }
    if delta_conf <= mass {
        return Ok(BoundReport::invalid(
            Theorem::Thm1S2s,
            delta_conf,
            "delta below beta mass",
        ));
    }
    let k = partition_sizes.len() as f64;
    let min_size = *partition_sizes.iter().min().unwrap() as f64;
    let conf = ((k / (delta_conf - mass)).ln() / (2.0 * min_size)).sqrt();
    let value = max_rademacher.value + delta_disc.value + conf;
    let mut report = BoundReport {
        theorem: Theorem::Thm1S2s,
        value: Some(value),
        valid: true,
        invalid_reason: None,
        delta: delta_conf,
        alpha: None,
        terms: BTreeMap::new(),
        flags: Vec::new(),
    };
    report.push_term(
        "rademacher_term",
        max_rademacher.value,
        max_rademacher.provenance.clone(),
    );
    report.push_term("discrepancy", delta_disc.value, delta_disc.provenance.clone());
    report.push_term("confidence_term", conf, "computed");
    report.push_term("beta_mass", mass, "input");
    report.push_term("k", k, "input");
    report.push_term("min_collection_size", min_size, "input");
    if delta_disc.provenance.contains("optimizer") {
        report.flags.push("optimizer_lower_bound".into());
    }
    Ok(report)
}

/// Independent-series bound.
pub fn thm2_independent_bound(
    rademacher: &Ingredient,
    delta_disc: &Ingredient,
    m: usize,
    delta_conf: f64,
    loss_cap: f64,
) -> Result<BoundReport> {
    if let Some(bad) = require_unit_loss_cap(Theorem::Thm2Independent, delta_conf, loss_cap) {
        return Ok(bad);
    }
    if m == 0 {
        return Err(CoreError::InvalidParameter("m must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&delta_conf) || delta_conf == 0.0 {
        return Err(CoreError::InvalidParameter(
            "confidence level must lie in (0, 1]".into(),
        ));
    }
    let conf = ((1.0 / delta_conf).ln() / m as f64).sqrt();
    let rad = 2.0 * rademacher.value;
    let value = rad + delta_disc.value + conf;
    let mut report = BoundReport {
        theorem: Theorem::Thm2Independent,
        value: Some(value),
        valid: true,
        invalid_reason: None,
        delta: delta_conf,
        alpha: None,
        terms: BTreeMap::new(),
        flags: Vec::new(),
    };
    report.push_term("rademacher_term", rad, format!("2x {}", rademacher.provenance));
    report.push_term("discrepancy", delta_disc.value, delta_disc.provenance.clone());
    report.push_term("confidence_term", conf, "computed");
    report.push_term("m", m as f64, "input");
    if delta_disc.provenance.contains("optimizer") {
        report.flags.push("optimizer_lower_bound".into());
    }
    Ok(report)
}

/// Local-model bound; the covering-number input is the labeled surrogate.
pub fn thm3_local_bound(
    mean_local_disc: &Ingredient,
    alpha: f64,
    t_len: usize,
    m: usize,
    max_log_covering: &Ingredient,
    delta_conf: f64,
    loss_cap: f64,
) -> Result<BoundReport> {
    if let Some(bad) = require_unit_loss_cap(Theorem::Thm3Local, delta_conf, loss_cap) {
        return Ok(bad);
    }
    if alpha <= 0.0 {
        return Err(CoreError::InvalidParameter("alpha must be > 0".into()));
    }
    if t_len == 0 || m == 0 {
        return Err(CoreError::InvalidParameter("need T >= 1 and m >= 1".into()));
    }
    if !(0.0..1.0).contains(&delta_conf) || delta_conf == 0.0 {
        return Err(CoreError::InvalidParameter(
            "confidence level must lie in (0, 1)".into(),
        ));
    }
    let log_arg = (m as f64 / delta_conf).ln() + max_log_covering.value;
    let conf = (2.0 / t_len as f64 * log_arg).sqrt();
    let alpha_term = 2.0 * alpha;
    let value = mean_local_disc.value + alpha_term + conf;
    let mut report = BoundReport {
        theorem: Theorem::Thm3Local,
        value: Some(value),
        valid: true,
        invalid_reason: None,
        delta: delta_conf,
        alpha: Some(alpha),
        terms: BTreeMap::new(),
        flags: vec!["surrogate_covering".into()],
    };
    report.push_term(
        "mean_local_discrepancy",
        mean_local_disc.value,
        mean_local_disc.provenance.clone(),
    );
    report.push_term("alpha_term", alpha_term, "computed");
    report.push_term("confidence_term", conf, "computed");
    report.push_term(
        "log_covering",
        max_log_covering.value,
        max_log_covering.provenance.clone(),
    );
    report.push_term("t_len", t_len as f64, "input");
    report.push_term("m", m as f64, "input");
    if mean_local_disc.provenance.contains("optimizer")
        || mean_local_disc.provenance.contains("grid")
    {
        report.flags.push("optimizer_lower_bound".into());
    }
    Ok(report)
}

/// Grid argmin over alpha of the local bound's alpha-dependent part, with
/// the covering log recomputed per alpha.
#[allow(clippy::too_many_arguments)]
pub fn thm3_alpha_sweep(
    mean_local_disc: &Ingredient,
    alphas: &[f64],
    t_len: usize,
    m: usize,
    lambda_cap: f64,
    data_radius: f64,
    p: usize,
    delta_conf: f64,
    loss_cap: f64,
) -> Result<(f64, BoundReport)> {
    if alphas.is_empty() {
        return Err(CoreError::InvalidParameter("alpha grid is empty".into()));
    }
    let mut best: Option<(f64, BoundReport)> = None;
    for &alpha in alphas {
        let covering =
            crate::complexity::linear_seq_covering_log(alpha, lambda_cap, data_radius, p, t_len)?;
        let cov_ing = Ingredient::new(covering.value, "surrogate_covering_growth");
        let report = thm3_local_bound(
            mean_local_disc,
            alpha,
            t_len,
            m,
            &cov_ing,
            delta_conf,
            loss_cap,
        )?;
        let v = report.value.unwrap_or(f64::INFINITY);
        if best
            .as_ref()
            .is_none_or(|(bv, _)| v < *bv)
        {
            best = Some((v, report));
        }
    }
    let (_, report) = best.unwrap();
    Ok((report.alpha.unwrap(), report))
}

/// Ingredients of the hybrid bound's partition branch.
#[derive(Clone, Debug)]
pub struct HybridB1 {
    pub mean_delta_t: Ingredient,
    pub max_rademacher: Ingredient,
    pub partition_sizes: Vec<usize>,
    pub betas_per_collection: Vec<f64>,
    pub t_len: usize,
}

/// Ingredients of the hybrid bound's local branch.
#[derive(Clone, Debug)]
pub struct HybridB2 {
    pub mean_local_disc: Ingredient,
    pub alpha: f64,
    pub t_len: usize,
    pub m: usize,
    pub max_log_covering: Ingredient,
}

/// Hybrid bound `min(B1, B2)`: both branches are evaluated with their own
/// validity; the report is invalid only when both branches are.
pub fn thm4_hybrid_bound(
    b1: &HybridB1,
    b2: &HybridB2,
    delta_conf: f64,
    loss_cap: f64,
) -> Result<BoundReport> {
    if let Some(bad) = require_unit_loss_cap(Theorem::Thm4Hybrid, delta_conf, loss_cap) {
        return Ok(bad);
    }
    if !(0.0..1.0).contains(&delta_conf) || delta_conf == 0.0 {
        return Err(CoreError::InvalidParameter(
            "confidence level must lie in (0, 1)".into(),
        ));
    }
    // branch 1: per-time-step partition bound with doubled mixing mass
    let mass = beta_mass(&b1.partition_sizes, &b1.betas_per_collection)?;
    let b1_value = if b1.partition_sizes.is_empty() || b1.t_len == 0 {
        return Err(CoreError::InvalidParameter(
            "hybrid B1 needs a partition and T >= 1".into(),
        ));
    } else if !mass.is_finite() || delta_conf <= 2.0 * mass {
        None
    } else {
        let k = b1.partition_sizes.len() as f64;
        let min_size = *b1.partition_sizes.iter().min().unwrap() as f64;
        let log_arg = 2.0 * b1.t_len as f64 * k / (delta_conf - 2.0 * mass);
        let conf = (log_arg.ln() / (2.0 * min_size)).sqrt();
        Some(b1.mean_delta_t.value + b1.max_rademacher.value + conf)
    };
    // branch 2: local bound with doubled m
    let b2_value = if b2.alpha <= 0.0 || b2.t_len == 0 || b2.m == 0 {
        return Err(CoreError::InvalidParameter(
            "hybrid B2 needs alpha > 0, T >= 1, m >= 1".into(),
        ));
    } else {
        let log_arg = (2.0 * b2.m as f64 / delta_conf).ln() + b2.max_log_covering.value;
        let conf = (2.0 / b2.t_len as f64 * log_arg).sqrt();
        Some(b2.mean_local_disc.value + 2.0 * b2.alpha + conf)
    };
    let mut report = BoundReport {
        theorem: Theorem::Thm4Hybrid,
        value: None,
        valid: false,
        invalid_reason: None,
        delta: delta_conf,
        alpha: Some(b2.alpha),
        terms: BTreeMap::new(),
        flags: vec!["surrogate_covering".into()],
    };
    if let Some(v) = b1_value {
        report.push_term("b1", v, "partition_branch");
        report.push_term("b1_mean_delta_t", b1.mean_delta_t.value, b1.mean_delta_t.provenance.clone());
        report.push_term(
            "b1_rademacher",
            b1.max_rademacher.value,
            b1.max_rademacher.provenance.clone(),
        );
        report.push_term("b1_beta_mass", mass, "input");
    }
    if let Some(v) = b2_value {
        report.push_term("b2", v, "local_branch");
        report.push_term(
            "b2_mean_local_discrepancy",
            b2.mean_local_disc.value,
            b2.mean_local_disc.provenance.clone(),
        );
        report.push_term(
            "b2_log_covering",
            b2.max_log_covering.value,
            b2.max_log_covering.provenance.clone(),
        );
    }
    match (b1_value, b2_value) {
        (None, None) => {
            report.invalid_reason = Some("both hybrid branches invalid".into());
        }
        (a, b) => {
            let v = match (a, b) {
                (Some(x), Some(y)) => x.min(y),
                (Some(x), None) => x,
                (None, Some(y)) => y,
                _ => unreachable!(),
            };
            report.value = Some(v);
            report.valid = true;
        }
    }
    Ok(report)
}

/// Concentration bound for the symmetric discrepancy around the expected
/// discrepancy.
pub fn prop2_delta_s_bound(
    delta_e: &Ingredient,
    max_rademacher_pair: &Ingredient,
    min_collection_size: usize,
    k: usize,
    bar_beta_mass: f64,
    delta_conf: f64,
    loss_cap: f64,
) -> Result<BoundReport> {
    if let Some(bad) = require_unit_loss_cap(Theorem::Prop2DeltaS, delta_conf, loss_cap) {
        return Ok(bad);
    }
    if min_collection_size == 0 || k == 0 {
        return Err(CoreError::InvalidParameter(
            "need c >= 1 and k >= 1".into(),
        ));
    }
    if !(0.0..1.0).contains(&delta_conf) || delta_conf == 0.0 {
        return Err(CoreError::InvalidParameter(
            "confidence level must lie in (0, 1)".into(),
        ));
    }
    if !bar_beta_mass.is_finite() || delta_conf <= bar_beta_mass {
        return Ok(BoundReport::invalid(
            Theorem::Prop2DeltaS,
            delta_conf,
            "delta below bar-beta mass",
        ));
    }
    let conf = ((2.0 * k as f64 / (delta_conf - bar_beta_mass)).ln()
        / (2.0 * min_collection_size as f64))
        .sqrt();
    let value = delta_e.value + max_rademacher_pair.value + conf;
    let mut report = BoundReport {
        theorem: Theorem::Prop2DeltaS,
        value: Some(value),
        valid: true,
        invalid_reason: None,
        delta: delta_conf,
        alpha: None,
        terms: BTreeMap::new(),
        flags: Vec::new(),
    };
    report.push_term(
        "expected_discrepancy",
        delta_e.value,
        delta_e.provenance.clone(),
    );
    report.push_term(
        "rademacher_term",
        max_rademacher_pair.value,
        max_rademacher_pair.provenance.clone(),
    );
    report.push_term("confidence_term", conf, "computed");
    report.push_term("bar_beta_mass", bar_beta_mass, "input");
    Ok(report)
}
