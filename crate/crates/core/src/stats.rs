//! Gaussian densities, clipped-loss expectations, and small-sample summaries.
//!
//! The clipped expectations are exact (expressed through the normal cdf), so
//! oracle risks stay closed-form even when the loss cap is active.

use std::f64::consts::PI;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal cdf via `erfc` (accurate in both tails).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// E[Z 1{a <= Z <= b}] for standard normal Z.
fn truncated_z_mean(a: f64, b: f64) -> f64 {
    normal_pdf(a) - normal_pdf(b)
}

/// E[Z^2 1{a <= Z <= b}] for standard normal Z.
fn truncated_z_square(a: f64, b: f64) -> f64 {
    (normal_cdf(b) - normal_cdf(a)) + a * normal_pdf(a) - b * normal_pdf(b)
}

/// E[min((pred - Y)^2, cap)] for Y ~ N(mu, sigma^2), exactly.
pub fn expected_clipped_squared_loss(pred: f64, mu: f64, sigma: f64, cap: f64) -> f64 {
    let d = pred - mu;
    if sigma <= 0.0 {
        return (d * d).min(cap);
    }
    let s = cap.sqrt();
    // residual X = d - sigma*Z; |X| <= s  <=>  Z in [(d-s)/sigma, (d+s)/sigma]
    let l = (d - s) / sigma;
    let u = (d + s) / sigma;
    let p_in = normal_cdf(u) - normal_cdf(l);
    let ez = truncated_z_mean(l, u);
    let ez2 = truncated_z_square(l, u);
    let inside = d * d * p_in - 2.0 * d * sigma * ez + sigma * sigma * ez2;
    inside + cap * (1.0 - p_in)
}

/// E[min(|pred - Y|, cap)] for Y ~ N(mu, sigma^2), exactly.
pub fn expected_clipped_absolute_loss(pred: f64, mu: f64, sigma: f64, cap: f64) -> f64 {
    let d = pred - mu;
    if sigma <= 0.0 {
        return d.abs().min(cap);
    }
    // residual X = d - sigma*Z; |X| <= cap  <=>  Z in [l, u]; X >= 0 <=> Z <= z0
    let l = (d - cap) / sigma;
    let u = (d + cap) / sigma;
    let z0 = d / sigma;
    let seg = |a: f64, b: f64, sign: f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        sign * (d * (normal_cdf(b) - normal_cdf(a)) - sigma * truncated_z_mean(a, b))
    };
    let inside = seg(l, z0.min(u), 1.0) + seg(z0.max(l), u, -1.0);
    let p_in = normal_cdf(u) - normal_cdf(l);
    inside + cap * (1.0 - p_in)
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F1(x) - F2(x)|.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    xb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Slope of the least-squares line through (x_i, y_i).
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_from_seed, standard_normal};

    #[test]
    fn cdf_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.96) - 0.975_002_104_85).abs() < 1e-9);
        assert!((normal_cdf(-8.0)).abs() < 1e-14);
    }

    /// Monte-Carlo oracle for the clipped expectations.
    fn mc_expectation(pred: f64, mu: f64, sigma: f64, cap: f64, squared: bool) -> f64 {
        let mut rng = rng_from_seed(99);
        let n = 400_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let y = mu + sigma * standard_normal(&mut rng);
            let base = if squared {
                (pred - y) * (pred - y)
            } else {
                (pred - y).abs()
            };
            acc += base.min(cap);
        }
        acc / n as f64
    }

    #[test]
    fn clipped_squared_matches_monte_carlo() {
        for &(pred, mu, sigma) in &[(0.3, 0.0, 0.5), (1.2, -0.4, 1.0), (0.0, 0.0, 2.0)] {
            let exact = expected_clipped_squared_loss(pred, mu, sigma, 1.0);
            let mc = mc_expectation(pred, mu, sigma, 1.0, true);
            assert!(
                (exact - mc).abs() < 5e-3,
                "pred={pred} mu={mu} sigma={sigma}: exact={exact} mc={mc}"
            );
        }
    }

    #[test]
    fn clipped_absolute_matches_monte_carlo() {
        for &(pred, mu, sigma) in &[(0.3, 0.0, 0.5), (1.2, -0.4, 1.0), (-0.7, 0.2, 0.3)] {
            let exact = expected_clipped_absolute_loss(pred, mu, sigma, 1.0);
            let mc = mc_expectation(pred, mu, sigma, 1.0, false);
            assert!(
                (exact - mc).abs() < 5e-3,
                "pred={pred} mu={mu} sigma={sigma}: exact={exact} mc={mc}"
            );
        }
    }

    #[test]
    fn unclipped_squared_limit_is_quadratic_formula() {
        // With a huge cap the clipped expectation reduces to (d^2 + sigma^2).
        let v = expected_clipped_squared_loss(0.7, 0.2, 0.4, 1e6);
        assert!((v - (0.25 + 0.16)).abs() < 1e-9);
    }

    #[test]
    fn degenerate_sigma_is_pointwise_loss() {
        assert_eq!(expected_clipped_squared_loss(2.0, 0.0, 0.0, 1.0), 1.0);
        assert_eq!(expected_clipped_absolute_loss(0.25, 0.0, 0.0, 1.0), 0.25);
    }

    #[test]
    fn ks_statistic_identical_samples_is_zero() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample_statistic(&xs, &xs), 0.0);
    }

    #[test]
    fn ks_statistic_disjoint_samples_is_one() {
        let a = [0.0, 0.1, 0.2];
        let b = [5.0, 6.0, 7.0];
        assert_eq!(ks_two_sample_statistic(&a, &b), 1.0);
    }
}
