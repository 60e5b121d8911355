//! Hypothesis classes, bounded losses, and closed-form ERM fitting.
//!
//! Three families are supported: norm-bounded linear predictors, the offset
//! class `x -> x_last + c` with `c` in [0, 1], and small feed-forward ReLU
//! networks with a bound on the product of layer Frobenius norms. Members
//! are stored as flat parameter vectors so the supremum search in
//! [`crate::optim`] can treat every class uniformly.
//!
//! Every hypothesis reads only the last `window()` coordinates of its input,
//! so the same member applies to prefixes of different lengths. This is what
//! makes the discrepancy definitions well-typed when a hypothesis is handed
//! both Y_1^T and Y_1^{T-1}.

use crate::error::{CoreError, Result};
use crate::linalg::{dot, norm2, solve_spd_with_ridge, Matrix};
use crate::panel::Example;
use crate::rng::rng_from_seed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Linear predictors `x -> w . x` over the last `window` values with
/// `||w||_2 <= lambda_cap`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearClass {
    pub window: usize,
    pub lambda_cap: f64,
}

/// Offset predictors `x -> x_last + c` with `c` in [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffsetClass;

/// ReLU feed-forward networks. `layer_widths` lists the input width followed
/// by each layer's output width; the final width must be 1. Members satisfy
/// `prod_k ||W_k||_F <= frobenius_product_cap`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReluNetClass {
    pub layer_widths: Vec<usize>,
    pub frobenius_product_cap: f64,
}

impl ReluNetClass {
    pub fn depth(&self) -> usize {
        self.layer_widths.len().saturating_sub(1)
    }

    fn layer_dims(&self) -> Vec<(usize, usize)> {
        self.layer_widths
            .windows(2)
            .map(|w| (w[1], w[0]))
            .collect()
    }
}

/// A parameterized hypothesis family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HypothesisClass {
    Linear(LinearClass),
    Offset(OffsetClass),
    ReluNet(ReluNetClass),
}

impl HypothesisClass {
    pub fn linear(window: usize, lambda_cap: f64) -> Self {
        HypothesisClass::Linear(LinearClass { window, lambda_cap })
    }

    pub fn offset() -> Self {
        HypothesisClass::Offset(OffsetClass)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            HypothesisClass::Linear(c) => {
                if c.window == 0 || c.lambda_cap <= 0.0 {
                    return Err(CoreError::InvalidParameter(
                        "linear class needs window >= 1 and lambda_cap > 0".into(),
                    ));
                }
            }
            HypothesisClass::Offset(_) => {}
            HypothesisClass::ReluNet(c) => {
                if c.layer_widths.len() < 2
                    || c.layer_widths.last() != Some(&1)
                    || c.layer_widths.contains(&0)
                    || c.frobenius_product_cap <= 0.0
                {
                    return Err(CoreError::InvalidParameter(
                        "relu class needs widths [in, ..., 1] and cap > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// How many trailing input values a member reads.
    pub fn window(&self) -> usize {
        match self {
            HypothesisClass::Linear(c) => c.window,
            HypothesisClass::Offset(_) => 1,
            HypothesisClass::ReluNet(c) => c.layer_widths[0],
        }
    }

    /// Length of the flat parameter vector of a member.
    pub fn param_dim(&self) -> usize {
        match self {
            HypothesisClass::Linear(c) => c.window,
            HypothesisClass::Offset(_) => 1,
            HypothesisClass::ReluNet(c) => {
                c.layer_dims().iter().map(|(r, co)| r * co).sum()
            }
        }
    }

    /// Prediction of the member on the last `window()` values of `input`.
    pub fn predict(&self, params: &[f64], input: &[f64]) -> Result<f64> {
        let w = self.window();
        if input.len() < w {
            return Err(CoreError::DimensionMismatch {
                expected: w,
                actual: input.len(),
            });
        }
        let tail = &input[input.len() - w..];
        Ok(match self {
            HypothesisClass::Linear(_) => dot(params, tail),
            HypothesisClass::Offset(_) => tail[0] + params[0],
            HypothesisClass::ReluNet(c) => {
                let mut act: Vec<f64> = tail.to_vec();
                let mut offset = 0;
                let dims = c.layer_dims();
                let depth = dims.len();
                for (layer, (rows, cols)) in dims.iter().enumerate() {
                    let mut next = vec![0.0; *rows];
                    for (r, nv) in next.iter_mut().enumerate() {
                        let start = offset + r * cols;
                        *nv = dot(&params[start..start + cols], &act);
                    }
                    offset += rows * cols;
                    if layer + 1 < depth {
                        for v in next.iter_mut() {
                            *v = v.max(0.0);
                        }
                    }
                    act = next;
                }
                act[0]
            }
        })
    }

    /// Project a parameter vector onto the feasible set (no-op when already
    /// feasible).
    pub fn project(&self, params: &mut [f64]) {
        match self {
            HypothesisClass::Linear(c) => {
                let n = norm2(params);
                if n > c.lambda_cap {
                    let scale = c.lambda_cap / n;
                    for v in params.iter_mut() {
                        *v *= scale;
                    }
                }
            }
            HypothesisClass::Offset(_) => {
                params[0] = params[0].clamp(0.0, 1.0);
            }
            HypothesisClass::ReluNet(c) => {
                let prod = self.frobenius_product(params);
                if prod > c.frobenius_product_cap && prod > 0.0 {
                    let d = c.depth() as f64;
                    let scale = (c.frobenius_product_cap / prod).powf(1.0 / d);
                    for v in params.iter_mut() {
                        *v *= scale;
                    }
                }
            }
        }
    }

    /// Product of layer Frobenius norms (ReLU nets only; other classes
    /// return 0).
    pub fn frobenius_product(&self, params: &[f64]) -> f64 {
        match self {
            HypothesisClass::ReluNet(c) => {
                let mut offset = 0;
                let mut prod = 1.0;
                for (rows, cols) in c.layer_dims() {
                    let block = &params[offset..offset + rows * cols];
                    prod *= norm2(block);
                    offset += rows * cols;
                }
                prod
            }
            _ => 0.0,
        }
    }

    /// Uniform-ish random feasible member for optimizer restarts.
    pub fn sample_member(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            HypothesisClass::Linear(c) => {
                // direction uniform on the sphere, radius u^(1/p) * cap
                let mut v: Vec<f64> =
                    (0..c.window).map(|_| crate::rng::standard_normal(rng)).collect();
                let n = norm2(&v).max(1e-300);
                let r = c.lambda_cap * rng.gen::<f64>().powf(1.0 / c.window as f64);
                for x in v.iter_mut() {
                    *x *= r / n;
                }
                v
            }
            HypothesisClass::Offset(_) => vec![rng.gen::<f64>()],
            HypothesisClass::ReluNet(c) => {
                let mut v: Vec<f64> = (0..self.param_dim())
                    .map(|_| crate::rng::standard_normal(rng))
                    .collect();
                let prod = self.frobenius_product(&v).max(1e-300);
                let target = c.frobenius_product_cap * rng.gen::<f64>();
                let scale = (target / prod).powf(1.0 / c.depth() as f64);
                for x in v.iter_mut() {
                    *x *= scale;
                }
                v
            }
        }
    }
}

/// Loss kind before clipping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossBase {
    Squared,
    Absolute,
}

/// A base loss clipped into [0, M]. The theorems in this toolkit require
/// M = 1; evaluators check that at the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedLoss {
    pub base: LossBase,
    pub clip_cap: f64,
}

impl BoundedLoss {
    pub fn squared() -> Self {
        BoundedLoss {
            base: LossBase::Squared,
            clip_cap: 1.0,
        }
    }

    pub fn absolute() -> Self {
        BoundedLoss {
            base: LossBase::Absolute,
            clip_cap: 1.0,
        }
    }

    pub fn eval(&self, yhat: f64, y: f64) -> f64 {
        self.eval_flagged(yhat, y).0
    }

    /// Loss value plus whether the clip was active.
    pub fn eval_flagged(&self, yhat: f64, y: f64) -> (f64, bool) {
        let raw = match self.base {
            LossBase::Squared => (yhat - y) * (yhat - y),
            LossBase::Absolute => (yhat - y).abs(),
        };
        if raw > self.clip_cap {
            (self.clip_cap, true)
        } else {
            (raw, false)
        }
    }

    /// Exact conditional expectation of the clipped loss when the target is
    /// Gaussian.
    pub fn expected_gaussian(&self, pred: f64, mu: f64, sigma: f64) -> f64 {
        match self.base {
            LossBase::Squared => {
                crate::stats::expected_clipped_squared_loss(pred, mu, sigma, self.clip_cap)
            }
            LossBase::Absolute => {
                crate::stats::expected_clipped_absolute_loss(pred, mu, sigma, self.clip_cap)
            }
        }
    }

    /// Lipschitz constant of the clipped loss in its first argument, given
    /// that residuals live in [-range, range].
    pub fn lipschitz_on_range(&self, range: f64) -> f64 {
        match self.base {
            // d/du min(u^2, M) has magnitude at most 2*min(range, sqrt(M))
            LossBase::Squared => 2.0 * range.min(self.clip_cap.sqrt()),
            LossBase::Absolute => 1.0,
        }
    }
}

/// Running counter of clipped loss evaluations; the acceptance experiments
/// report the clip fraction so the M = 1 precondition stays visible.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ClipStats {
    pub evaluated: u64,
    pub clipped: u64,
}

impl ClipStats {
    pub fn record(&mut self, clipped: bool) {
        self.evaluated += 1;
        if clipped {
            self.clipped += 1;
        }
    }

    pub fn fraction(&self) -> f64 {
        if self.evaluated == 0 {
            0.0
        } else {
            self.clipped as f64 / self.evaluated as f64
        }
    }

    pub fn merge(&mut self, other: ClipStats) {
        self.evaluated += other.evaluated;
        self.clipped += other.clipped;
    }
}

/// Ridge least squares on the example windows, then Euclidean projection
/// onto the lambda ball. With `ridge = 0` and a singular design, the
/// minimum-norm solution is used.
pub fn fit_linear_erm(
    examples: &[Example],
    class: &LinearClass,
    ridge: f64,
) -> Result<Vec<f64>> {
    if examples.is_empty() {
        return Err(CoreError::InvalidParameter(
            "ERM requires at least one example".into(),
        ));
    }
    let p = class.window;
    for ex in examples {
        if ex.input.len() < p {
            return Err(CoreError::DimensionMismatch {
                expected: p,
                actual: ex.input.len(),
            });
        }
    }
    let n = examples.len() as f64;
    let mut gram = Matrix::zeros(p, p);
    let mut xty = vec![0.0; p];
    for ex in examples {
        let x = &ex.input[ex.input.len() - p..];
        for a in 0..p {
            xty[a] += x[a] * ex.target / n;
            for b in a..p {
                gram[(a, b)] += x[a] * x[b] / n;
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    let mut w = solve_spd_with_ridge(&gram, ridge, &xty)?;
    let cls = HypothesisClass::Linear(class.clone());
    cls.project(&mut w);
    Ok(w)
}

/// Fit the offset class: mean increment clipped into [0, 1].
pub fn fit_offset(examples: &[Example]) -> Result<f64> {
    if examples.is_empty() {
        return Err(CoreError::InvalidParameter(
            "offset fit requires at least one example".into(),
        ));
    }
    let mut acc = 0.0;
    for ex in examples {
        let last = *ex.input.last().ok_or(CoreError::DimensionMismatch {
            expected: 1,
            actual: 0,
        })?;
        acc += ex.target - last;
    }
    Ok((acc / examples.len() as f64).clamp(0.0, 1.0))
}

/// Mean clipped loss of a member over examples.
pub fn erm_risk(
    examples: &[Example],
    class: &HypothesisClass,
    params: &[f64],
    loss: &BoundedLoss,
) -> Result<f64> {
    Ok(erm_risk_with_clipstats(examples, class, params, loss)?.0)
}

/// Mean clipped loss plus clip accounting.
pub fn erm_risk_with_clipstats(
    examples: &[Example],
    class: &HypothesisClass,
    params: &[f64],
    loss: &BoundedLoss,
) -> Result<(f64, ClipStats)> {
    if examples.is_empty() {
        return Err(CoreError::InvalidParameter(
            "risk over an empty example set".into(),
        ));
    }
    let mut acc = 0.0;
    let mut clip = ClipStats::default();
    for ex in examples {
        let pred = class.predict(params, &ex.input)?;
        let (l, c) = loss.eval_flagged(pred, ex.target);
        clip.record(c);
        acc += l;
    }
    Ok((acc / examples.len() as f64, clip))
}

/// Deterministically sample a feasible member (used by tests and the CLI).
pub fn sample_member_seeded(class: &HypothesisClass, seed: u64) -> Vec<f64> {
    class.sample_member(&mut rng_from_seed(seed))
}
