//! `yu-check`: brute-force verification of the independence-surrogate
//! inequality |E f(C~) - E f(C)| <= (|C| - 1) beta on finite discrete pair
//! distributions, where C~ is the independent coupling with matched
//! marginals and beta the total-variation distance between joint and
//! product.

use crate::config::ExperimentConfig;
use crate::report::{fmt_f64, CommandOutput};
use rand::Rng;
use seqbound_core::rng::{derive_seed, rng_from_seed};
use serde::Serialize;
use serde_json::json;

#[derive(Clone, Debug, Serialize)]
pub struct YuRow {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Exact enumeration of both sides for one joint distribution and one
/// bounded payoff table.
pub fn yu_inequality(joint: &[Vec<f64>], f: &[Vec<f64>]) -> anyhow::Result<(f64, f64)> {
    let n = joint.len();
    if n == 0 || joint.iter().any(|r| r.len() != n) {
        anyhow::bail!("joint distribution must be a square matrix");
    }
    if f.len() != n || f.iter().any(|r| r.len() != n) {
        anyhow::bail!("payoff table must match the joint's shape");
    }
    let total: f64 = joint.iter().flatten().sum();
    if joint.iter().flatten().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-9 {
        anyhow::bail!("joint entries must be nonnegative and sum to 1");
    }
    if f.iter().flatten().any(|&v| !(0.0..=1.0).contains(&v)) {
        anyhow::bail!("payoffs must lie in [0, 1]");
    }
    let px: Vec<f64> = (0..n).map(|i| joint[i].iter().sum()).collect();
    let py: Vec<f64> = (0..n).map(|j| (0..n).map(|i| joint[i][j]).sum()).collect();
    let mut lhs = 0.0;
    let mut tv = 0.0;
    for i in 0..n {
        for j in 0..n {
            let diff = joint[i][j] - px[i] * py[j];
            lhs += f[i][j] * diff;
            tv += diff.abs();
        }
    }
    // pair collections have |C| = 2, so the penalty is (2 - 1) * beta
    Ok((lhs.abs(), 0.5 * tv))
}

fn random_joint(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut j: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect())
        .collect();
    let total: f64 = j.iter().flatten().sum();
    for row in j.iter_mut() {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    j
}

fn random_payoff(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<CommandOutput> {
    let mut rows: Vec<YuRow> = Vec::new();

    if let (Some(joint), Some(f)) = (&cfg.yu_joint, &cfg.yu_f) {
        let (lhs, rhs) = yu_inequality(joint, f)?;
        rows.push(YuRow {
            case: "explicit".into(),
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-12,
        });
    } else {
        // independent joint: both sides vanish
        let independent = {
            let px = [0.5, 0.3, 0.2];
            (0..3)
                .map(|i| (0..3).map(|j| px[i] * px[j]).collect::<Vec<f64>>())
                .collect::<Vec<_>>()
        };
        let f_any = vec![
            vec![1.0, 0.0, 0.5],
            vec![0.25, 0.75, 0.0],
            vec![0.0, 1.0, 1.0],
        ];
        let (lhs, rhs) = yu_inequality(&independent, &f_any)?;
        rows.push(YuRow {
            case: "independent_joint".into(),
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-12,
        });

        // perfectly correlated 3-state pair with the equality indicator:
        // lhs = 1 - sum p_i^2 and the inequality is tight
        let p = [0.5, 0.3, 0.2];
        let correlated: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { p[i] } else { 0.0 })
                    .collect()
            })
            .collect();
        let indicator: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let (lhs, rhs) = yu_inequality(&correlated, &indicator)?;
        let expected = 1.0 - p.iter().map(|x| x * x).sum::<f64>();
        if (lhs - expected).abs() > 1e-12 || (rhs - expected).abs() > 1e-12 {
            anyhow::bail!("correlated-case enumeration mismatch: lhs {lhs}, rhs {rhs}");
        }
        rows.push(YuRow {
            case: "perfectly_correlated_equality_indicator".into(),
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-12,
        });

        let n_states = cfg.yu_states.unwrap_or(4);
        let n_seeds = cfg.yu_seeds.unwrap_or(100);
        let base = cfg.seed_or_default();
        for s in 0..n_seeds {
            let mut rng = rng_from_seed(derive_seed(base, s as u64));
            let joint = random_joint(n_states, &mut rng);
            let f = random_payoff(n_states, &mut rng);
            let (lhs, rhs) = yu_inequality(&joint, &f)?;
            rows.push(YuRow {
                case: format!("random_{s}"),
                lhs,
                rhs,
                holds: lhs <= rhs + 1e-12,
            });
        }
    }

    let all_hold = rows.iter().all(|r| r.holds);
    let mut csv = String::from("case,lhs,rhs,holds\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.case,
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            r.holds
        ));
    }
    let mut out = CommandOutput::json(json!({
        "all_hold": all_hold,
        "n_cases": rows.len(),
        "rows": rows,
    }));
    out.csv = Some(csv);
    out.precondition_violated = !all_hold;
    Ok(out)
}
