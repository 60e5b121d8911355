//! Beta-mixing coefficients for cross-series dependence.
//!
//! For jointly Gaussian AR noise, the conditional law of a pair of next
//! values given the shared history is a bivariate Gaussian whose correlation
//! equals the noise correlation, so the expected conditional total-variation
//! distance reduces to one bivariate TV integral. That integral is the
//! numerical oracle here; the analytic route is the closed-form bound
//! `max(3 / (2 (1 - sigma0^2)), 1 / (1 - 2 sigma0)) * sigma`.
//!
//! The closed-form bound ships with a companion constant,
//! `max(3 / (e (1 - sigma^2)), 2 / (1 - 2 sigma)) * sigma`, because the two
//! published routes to the bound disagree by a factor in the second branch;
//! both are computed, and validation compares the oracle against their
//! maximum rather than guessing which was intended.

use crate::error::{CoreError, Result};
use crate::linalg::Matrix;
use crate::partitions::Partition;
use crate::processes::ArSampler;
use crate::rng::derive_seed;
use crate::stats::normal_pdf;
use serde::{Deserialize, Serialize};

/// How a mixing value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingKind {
    AnalyticLemma2,
    NumericTv,
    BarBetaUpper,
}

/// A mixing coefficient (or an upper bound on one).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingEstimate {
    pub value: f64,
    pub kind: MixingKind,
    /// Pairwise noise correlation the estimate refers to.
    pub sigma: f64,
    /// Numerical-integration error estimate (numeric kind only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// Closed-form upper bound on the expected conditional mixing coefficient of
/// two AR series whose noise correlation is `sigma`, with `sigma <= sigma0`.
pub fn analytic_beta_s2s(sigma: f64, sigma0: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&sigma0) || sigma < 0.0 || sigma > sigma0 {
        return Err(CoreError::InvalidParameter(format!(
            "analytic_beta_s2s requires 0 <= sigma <= sigma0 < 0.5, got sigma={sigma}, sigma0={sigma0}"
        )));
    }
    let c = (3.0 / (2.0 * (1.0 - sigma0 * sigma0))).max(1.0 / (1.0 - 2.0 * sigma0));
    Ok(c * sigma)
}

/// Companion constant derived along the alternative route (see module docs).
pub fn proof_constant_beta_s2s(sigma: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&sigma) {
        return Err(CoreError::InvalidParameter(format!(
            "proof_constant_beta_s2s requires 0 <= sigma < 0.5, got {sigma}"
        )));
    }
    let e = std::f64::consts::E;
    let c = (3.0 / (e * (1.0 - sigma * sigma))).max(2.0 / (1.0 - 2.0 * sigma));
    Ok(c * sigma)
}

/// Both closed-form values side by side.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaBoundPair {
    pub statement_value: f64,
    pub proof_value: f64,
}

impl LemmaBoundPair {
    pub fn max(&self) -> f64 {
        self.statement_value.max(self.proof_value)
    }
}

pub fn analytic_beta_pair(sigma: f64, sigma0: f64) -> Result<LemmaBoundPair> {
    Ok(LemmaBoundPair {
        statement_value: analytic_beta_s2s(sigma, sigma0)?,
        proof_value: proof_constant_beta_s2s(sigma)?,
    })
}

/// Numerical oracle: total-variation distance between a standard bivariate
/// Gaussian with correlation `sigma` and the product of its marginals,
/// `(1/2) int int |p(u) p(v) - p_sigma(u, v)| du dv`, by the trapezoid rule.
///
/// The reported tolerance is the difference against the same integral at
/// twice the grid step. With `grid_halfwidth >= 6` and `grid_step <= 0.01`
/// the result is accurate to about 1e-4.
pub fn numeric_tv_bivariate_gaussian(
    sigma: f64,
    grid_halfwidth: f64,
    grid_step: f64,
) -> Result<MixingEstimate> {
    if sigma.abs() >= 1.0 {
        return Err(CoreError::InvalidParameter(format!(
            "numeric TV requires |sigma| < 1, got {sigma}"
        )));
    }
    if grid_halfwidth <= 0.0 || grid_step <= 0.0 {
        return Err(CoreError::InvalidParameter(
            "grid halfwidth and step must be positive".into(),
        ));
    }
    let fine = tv_trapezoid(sigma, grid_halfwidth, grid_step);
    let coarse = tv_trapezoid(sigma, grid_halfwidth, grid_step * 2.0);
    Ok(MixingEstimate {
        value: fine,
        kind: MixingKind::NumericTv,
        sigma,
        tolerance: Some((fine - coarse).abs()),
    })
}

fn tv_trapezoid(sigma: f64, halfwidth: f64, step: f64) -> f64 {
    let n = (halfwidth / step).round() as i64;
    let total = (2 * n + 1) as usize;
    let xs: Vec<f64> = (-n..=n).map(|k| k as f64 * step).collect();
    let pdf: Vec<f64> = xs.iter().map(|&x| normal_pdf(x)).collect();
    let one_minus = 1.0 - sigma * sigma;
    let joint_norm = 1.0 / (2.0 * std::f64::consts::PI * one_minus.sqrt());
    let mut acc = 0.0;
    for i in 0..total {
        let u = xs[i];
        let wu = if i == 0 || i == total - 1 { 0.5 } else { 1.0 };
        let mut row = 0.0;
        for j in 0..total {
            let v = xs[j];
            let wv = if j == 0 || j == total - 1 { 0.5 } else { 1.0 };
            let q = (u * u - 2.0 * sigma * u * v + v * v) / one_minus;
            let joint = joint_norm * (-0.5 * q).exp();
            row += wv * (pdf[i] * pdf[j] - joint).abs();
        }
        acc += wu * row;
    }
    0.5 * acc * step * step
}

/// Per-collection analytic mixing bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CollectionBeta {
    pub value: f64,
    /// Largest in-collection absolute noise correlation (the sigma0 used).
    pub max_correlation: f64,
    /// False when some in-collection correlation reaches 0.5 and the closed
    /// form does not apply; downstream bounds must then be marked invalid.
    pub applicable: bool,
}

/// Analytic mixing bound for every collection of a partition. Correlations
/// are read off the noise covariance (normalized by its diagonal); singleton
/// collections have no pairs and get 0 by the empty-sup convention.
pub fn collection_beta(noise_cov: &Matrix, partition: &Partition) -> Result<Vec<CollectionBeta>> {
    let m = noise_cov.nrows();
    let corr = |i: usize, j: usize| -> f64 {
        let d = (noise_cov[(i, i)] * noise_cov[(j, j)]).sqrt();
        if d == 0.0 {
            0.0
        } else {
            (noise_cov[(i, j)] / d).abs()
        }
    };
    let mut out = Vec::with_capacity(partition.k());
    for set in partition.index_sets() {
        if set.iter().any(|&i| i >= m) {
            return Err(CoreError::IndexOutOfRange(
                "partition index outside covariance".into(),
            ));
        }
        if set.len() < 2 {
            out.push(CollectionBeta {
                value: 0.0,
                max_correlation: 0.0,
                applicable: true,
            });
            continue;
        }
        let mut sigma0: f64 = 0.0;
        for (a, &i) in set.iter().enumerate() {
            for &j in &set[a + 1..] {
                sigma0 = sigma0.max(corr(i, j));
            }
        }
        if sigma0 >= 0.5 {
            out.push(CollectionBeta {
                value: f64::INFINITY,
                max_correlation: sigma0,
                applicable: false,
            });
            continue;
        }
        let mut value: f64 = 0.0;
        for (a, &i) in set.iter().enumerate() {
            for &j in &set[a + 1..] {
                value = value.max(analytic_beta_s2s(corr(i, j), sigma0)?);
            }
        }
        out.push(CollectionBeta {
            value,
            max_correlation: sigma0,
            applicable: true,
        });
    }
    Ok(out)
}

/// Upper bound on the unconditional mixing coefficient: conditional
/// coefficient plus the history-covariance term.
pub fn bar_beta_upper(beta_s2s_val: f64, cov_term: f64) -> Result<f64> {
    if beta_s2s_val < 0.0 || cov_term < 0.0 {
        return Err(CoreError::InvalidParameter(
            "bar_beta_upper inputs must be nonnegative".into(),
        ));
    }
    Ok(beta_s2s_val + cov_term)
}

/// Monte-Carlo estimate of the history-covariance term for a pair of series:
/// the absolute covariance, across simulated histories, of the two series'
/// conditional means given the panel prefix.
pub fn conditional_mean_cov_mc(
    sampler: &ArSampler,
    i: usize,
    j: usize,
    n_histories: usize,
    seed: u64,
) -> Result<f64> {
    let spec = sampler.spec();
    if i >= spec.m || j >= spec.m {
        return Err(CoreError::IndexOutOfRange(
            "series index outside spec".into(),
        ));
    }
    if n_histories < 2 {
        return Err(CoreError::InvalidParameter(
            "need at least 2 histories".into(),
        ));
    }
    let t = spec.t_len;
    let mut mi = Vec::with_capacity(n_histories);
    let mut mj = Vec::with_capacity(n_histories);
    for h in 0..n_histories {
        let panel = sampler.draw(derive_seed(seed, h as u64));
        mi.push(sampler.conditional_mean(i, &panel.row(i)[..t - 1]));
        mj.push(sampler.conditional_mean(j, &panel.row(j)[..t - 1]));
    }
    let n = n_histories as f64;
    let mean_i = mi.iter().sum::<f64>() / n;
    let mean_j = mj.iter().sum::<f64>() / n;
    let cov = mi
        .iter()
        .zip(&mj)
        .map(|(a, b)| (a - mean_i) * (b - mean_j))
        .sum::<f64>()
        / (n - 1.0);
    Ok(cov.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{ArCorrelatedSpec, WeightSpec};

    #[test]
    fn analytic_hand_values() {
        // sigma = 0.1, sigma0 = 0.3: max(3/1.82, 2.5) * 0.1 = 0.25
        assert!((analytic_beta_s2s(0.1, 0.3).unwrap() - 0.25).abs() < 1e-12);
        // sigma = 0.05, sigma0 = 0.1: max(3/1.98, 1.25) * 0.05
        let expected = (3.0 / 1.98) * 0.05;
        assert!((analytic_beta_s2s(0.05, 0.1).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.0757575757).abs() < 1e-9);
        assert_eq!(analytic_beta_s2s(0.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn analytic_domain_errors() {
        assert!(analytic_beta_s2s(0.1, 0.5).is_err());
        assert!(analytic_beta_s2s(0.4, 0.3).is_err());
        assert!(analytic_beta_s2s(-0.1, 0.3).is_err());
    }

    #[test]
    fn analytic_monotone_in_sigma() {
        let mut prev = -1.0;
        for k in 0..=29 {
            let sigma = k as f64 * 0.01;
            let v = analytic_beta_s2s(sigma, 0.3).unwrap();
            assert!(v >= prev);
            assert!(v >= 0.0);
            if sigma > 0.0 {
                assert!(v > 0.0);
            }
            prev = v;
        }
    }

    #[test]
    fn proof_constant_pair() {
        let pair = analytic_beta_pair(0.2, 0.3).unwrap();
        assert!((pair.statement_value - 0.5).abs() < 1e-12);
        // proof route at sigma = 0.2: max(3/(e*0.96), 2/0.6) * 0.2
        let e = std::f64::consts::E;
        let expected = (3.0 / (e * 0.96)).max(2.0 / 0.6) * 0.2;
        assert!((pair.proof_value - expected).abs() < 1e-12);
    }

    #[test]
    fn tv_zero_correlation_is_zero() {
        let est = numeric_tv_bivariate_gaussian(0.0, 6.0, 0.05).unwrap();
        assert!(est.value < 1e-6, "{}", est.value);
    }

    #[test]
    fn tv_sign_symmetric_and_bounded() {
        let plus = numeric_tv_bivariate_gaussian(0.3, 6.0, 0.05).unwrap();
        let minus = numeric_tv_bivariate_gaussian(-0.3, 6.0, 0.05).unwrap();
        assert!((plus.value - minus.value).abs() < 1e-8);
        assert!(plus.value > 0.0 && plus.value < 1.0);
    }

    #[test]
    fn tv_small_sigma_linear_slope() {
        // leading behaviour is sigma / pi
        let est = numeric_tv_bivariate_gaussian(0.05, 6.0, 0.02).unwrap();
        let lead = 0.05 / std::f64::consts::PI;
        assert!(
            (est.value - lead).abs() < 0.15 * lead,
            "tv {} vs leading {lead}",
            est.value
        );
    }

    #[test]
    fn tv_grid_refinement_within_reported_tolerance() {
        let coarse = numeric_tv_bivariate_gaussian(0.2, 6.0, 0.04).unwrap();
        let fine = numeric_tv_bivariate_gaussian(0.2, 6.0, 0.02).unwrap();
        assert!(
            (coarse.value - fine.value).abs() <= coarse.tolerance.unwrap() + 1e-12,
            "refinement moved more than reported tolerance"
        );
    }

    #[test]
    fn tv_below_analytic_bound() {
        let est = numeric_tv_bivariate_gaussian(0.2, 6.0, 0.02).unwrap();
        let bound = analytic_beta_pair(0.2, 0.3).unwrap().max();
        assert!(est.value <= bound, "tv {} > bound {bound}", est.value);
    }

    #[test]
    fn collection_beta_diagonal_is_zero() {
        let cov = Matrix::identity(4);
        let part = Partition::whole(4);
        let betas = collection_beta(&cov, &part).unwrap();
        assert_eq!(betas.len(), 1);
        assert_eq!(betas[0].value, 0.0);
        assert!(betas[0].applicable);
    }

    #[test]
    fn collection_beta_hierarchical_depth2() {
        let cov = crate::processes::hierarchical_covariance(2, 4.0)
            .unwrap()
            .matrix;
        let part = crate::partitions::hierarchical_partition(2, 1).unwrap();
        let betas = collection_beta(&cov, &part).unwrap();
        // in-collection pairs are cross-subtree: sigma = 1/16
        let expected = analytic_beta_s2s(0.0625, 0.0625).unwrap();
        for b in &betas {
            assert!((b.value - expected).abs() < 1e-12);
            assert!((b.max_correlation - 0.0625).abs() < 1e-12);
        }
    }

    #[test]
    fn collection_beta_singletons_and_inapplicable() {
        let cov = Matrix::from_rows(vec![vec![1.0, 0.7], vec![0.7, 1.0]]).unwrap();
        let singles = Partition::singletons(2);
        let betas = collection_beta(&cov, &singles).unwrap();
        assert!(betas.iter().all(|b| b.value == 0.0 && b.applicable));

        let whole = Partition::whole(2);
        let betas = collection_beta(&cov, &whole).unwrap();
        assert!(!betas[0].applicable);
    }

    #[test]
    fn bar_beta_upper_additive() {
        assert_eq!(bar_beta_upper(0.0, 0.0).unwrap(), 0.0);
        assert!((bar_beta_upper(0.25, 0.05).unwrap() - 0.30).abs() < 1e-15);
        assert!(bar_beta_upper(-0.1, 0.0).is_err());
    }

    #[test]
    fn cov_term_vanishes_for_independent_rows() {
        let mut cov = Matrix::zeros(2, 2);
        cov[(0, 0)] = 0.09;
        cov[(1, 1)] = 0.09;
        let spec = ArCorrelatedSpec {
            m: 2,
            t_len: 12,
            weights: WeightSpec::Shared(vec![0.5]),
            noise_cov: cov,
            burn_in: 100,
            seed: 3,
        };
        let sampler = ArSampler::new(&spec).unwrap();
        let cov_term = conditional_mean_cov_mc(&sampler, 0, 1, 2000, 77).unwrap();
        // conditional means have std ~ 0.17; the product's MC noise scales
        // like var/sqrt(n)
        assert!(cov_term < 3.0 * 0.04 / (2000.0_f64).sqrt(), "cov {cov_term}");
    }
}
