//! Rademacher-complexity estimators and closed-form capacity bounds.
//!
//! The empirical estimator averages, over random sign vectors, the supremum
//! correlation of the loss class with the signs. Closed forms cover
//! norm-bounded linear predictors (`cap * max ||Z_i|| / sqrt(m)`) and ReLU
//! networks (`2^(d - 1/2) * gamma * max ||Z_i|| / sqrt(m)`). For loss
//! compositions, multiply by a Lipschitz contraction constant computed from
//! the observed data range.
//!
//! The sequential covering number needed by the local-model bound has no
//! closed form here; `linear_seq_covering_log` supplies a standard
//! parametric-growth surrogate, and everything downstream labels it as such.

use crate::error::{CoreError, Result};
use crate::hypotheses::{BoundedLoss, HypothesisClass};
use crate::linalg::norm2;
use crate::optim::{maximize, MemberSpace, OptBudget};
use crate::panel::Example;
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::mean_and_stderr;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityKind {
    EmpiricalRademacher,
    LinearClosedForm,
    ReluClosedForm,
    CoveringLog,
}

/// A capacity value with provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub value: f64,
    pub kind: ComplexityKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sigma_draws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

/// Monte-Carlo empirical Rademacher complexity of the loss class
/// `f(h, Z) = L(h(input), target)`: for each sign vector, the supremum of
/// `(1/m) sum_i sigma_i f(h, Z_i)` over `h` is found with the shared
/// optimizer, then averaged over `n_sigma_draws` draws.
pub fn empirical_rademacher(
    examples: &[Example],
    class: &HypothesisClass,
    loss: &BoundedLoss,
    n_sigma_draws: usize,
    budget: &OptBudget,
    seed: u64,
) -> Result<ComplexityEstimate> {
    if examples.is_empty() {
        return Err(CoreError::InvalidParameter(
            "empirical Rademacher needs at least one example".into(),
        ));
    }
    if n_sigma_draws == 0 {
        return Err(CoreError::InvalidParameter(
            "need at least one sign draw".into(),
        ));
    }
    class.validate()?;
    let w = class.window();
    for ex in examples {
        if ex.input.len() < w {
            return Err(CoreError::DimensionMismatch {
                expected: w,
                actual: ex.input.len(),
            });
        }
    }
    let m = examples.len();
    let mut sigma_rng = rng_from_seed(derive_seed(seed, 0));
    let mut sups = Vec::with_capacity(n_sigma_draws);
    let space = MemberSpace::single(class);
    for draw in 0..n_sigma_draws {
        let signs: Vec<f64> = (0..m)
            .map(|_| if sigma_rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let objective = |params: &[f64]| {
            let mut acc = 0.0;
            for (ex, s) in examples.iter().zip(&signs) {
                let pred = class
                    .predict(params, &ex.input)
                    .expect("validated window");
                acc += s * loss.eval(pred, ex.target);
            }
            acc / m as f64
        };
        let est = maximize(&space, objective, budget, derive_seed(seed, 1 + draw as u64));
        sups.push(est.value);
    }
    let (mean, stderr) = mean_and_stderr(&sups);
    Ok(ComplexityEstimate {
        value: mean,
        kind: ComplexityKind::EmpiricalRademacher,
        n_sigma_draws: Some(n_sigma_draws),
        stderr: Some(stderr),
    })
}

/// Closed form for the linear hypothesis class (not yet composed with a
/// loss): `lambda_cap * max_i ||input_i|| / sqrt(m)`.
pub fn linear_rademacher_bound(
    lambda_cap: f64,
    examples: &[Example],
) -> Result<ComplexityEstimate> {
    if examples.is_empty() {
        return Err(CoreError::InvalidParameter(
            "linear bound needs at least one example".into(),
        ));
    }
    let max_norm = examples
        .iter()
        .map(|e| norm2(&e.input))
        .fold(0.0, f64::max);
    Ok(ComplexityEstimate {
        value: lambda_cap * max_norm / (examples.len() as f64).sqrt(),
        kind: ComplexityKind::LinearClosedForm,
        n_sigma_draws: None,
        stderr: None,
    })
}

/// Closed form for depth-`d` ReLU networks with Frobenius-product cap
/// `gamma`: `2^(d - 1/2) * gamma * max_i ||input_i|| / sqrt(m)`.
pub fn relu_net_rademacher_bound(
    depth: usize,
    gamma: f64,
    examples: &[Example],
) -> Result<ComplexityEstimate> {
    if depth < 1 {
        return Err(CoreError::InvalidParameter("depth must be >= 1".into()));
    }
    if gamma < 0.0 {
        return Err(CoreError::InvalidParameter("gamma must be >= 0".into()));
    }
    if examples.is_empty() {
        return Err(CoreError::InvalidParameter(
            "relu bound needs at least one example".into(),
        ));
    }
    let max_norm = examples
        .iter()
        .map(|e| norm2(&e.input))
        .fold(0.0, f64::max);
    let value = 2.0_f64.powf(depth as f64 - 0.5) * gamma * max_norm
        / (examples.len() as f64).sqrt();
    Ok(ComplexityEstimate {
        value,
        kind: ComplexityKind::ReluClosedForm,
        n_sigma_draws: None,
        stderr: None,
    })
}

/// Lipschitz contraction constant for composing a hypothesis-class bound
/// with the clipped loss, computed from the observed data range: residuals
/// are bounded by the class's largest possible prediction plus the largest
/// target magnitude.
pub fn contraction_constant(
    loss: &BoundedLoss,
    class: &HypothesisClass,
    examples: &[Example],
) -> f64 {
    let w = class.window();
    let max_input_norm = examples
        .iter()
        .map(|e| {
            let tail = &e.input[e.input.len().saturating_sub(w)..];
            norm2(tail)
        })
        .fold(0.0, f64::max);
    let max_target = examples
        .iter()
        .map(|e| e.target.abs())
        .fold(0.0, f64::max);
    let pred_range = match class {
        HypothesisClass::Linear(c) => c.lambda_cap * max_input_norm,
        HypothesisClass::Offset(_) => {
            examples
                .iter()
                .map(|e| e.input.last().copied().unwrap_or(0.0).abs())
                .fold(0.0, f64::max)
                + 1.0
        }
        HypothesisClass::ReluNet(c) => c.frobenius_product_cap * max_input_norm,
    };
    loss.lipschitz_on_range(pred_range + max_target)
}

/// Surrogate upper bound on the log expected sequential covering number of
/// a norm-bounded linear class at scale `alpha`:
/// `p * log(1 + 2 * lambda_cap * data_radius * sqrt(T) / alpha)`.
///
/// This is the coarsest standard parametric-class growth bound; reports that
/// consume it must carry the `surrogate_covering` flag.
pub fn linear_seq_covering_log(
    alpha: f64,
    lambda_cap: f64,
    data_radius: f64,
    p: usize,
    t_len: usize,
) -> Result<ComplexityEstimate> {
    if alpha <= 0.0 {
        return Err(CoreError::InvalidParameter("alpha must be > 0".into()));
    }
    if lambda_cap < 0.0 || data_radius < 0.0 {
        return Err(CoreError::InvalidParameter(
            "caps and radii must be nonnegative".into(),
        ));
    }
    let value =
        p as f64 * (1.0 + 2.0 * lambda_cap * data_radius * (t_len as f64).sqrt() / alpha).ln();
    Ok(ComplexityEstimate {
        value,
        kind: ComplexityKind::CoveringLog,
        n_sigma_draws: None,
        stderr: None,
    })
}
