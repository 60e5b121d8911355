//! Acceptance suite: every criterion the toolkit must meet, each printed as
//! one PASS line (failures abort with the offending values). Run with
//! `cargo test -p seqbound-cli --test acceptance`.

use seqbound_cli::commands;
use seqbound_cli::config::{ExperimentConfig, PartitionConfig, RegimeCell, TentExampleConfig};
use seqbound_core::bounds::{self, Ingredient};
use seqbound_core::discrepancy::{
    delta_e_mc, delta_oracle, delta_s, delta_s_linear_exact, ConditionalEstimator,
};
use seqbound_core::hypotheses::{BoundedLoss, HypothesisClass, LinearClass};
use seqbound_core::linalg::Matrix;
use seqbound_core::mixing::{analytic_beta_pair, numeric_tv_bivariate_gaussian};
use seqbound_core::optim::OptBudget;
use seqbound_core::processes::{
    hierarchical_covariance, ArCorrelatedSpec, ProcessSpec, TentPhaseMode, TentSpec, WeightSpec,
};
use seqbound_core::rng::derive_seed;
use seqbound_core::stats::regression_slope;


fn elapsed_secs(start: std::time::Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

fn diag(m: usize, v: f64) -> Matrix {
    let mut c = Matrix::zeros(m, m);
    for i in 0..m {
        c[(i, i)] = v;
    }
    c
}

fn ar_spec(
    m: usize,
    t_len: usize,
    weights: Vec<f64>,
    noise_var: f64,
    burn_in: usize,
    seed: u64,
) -> ArCorrelatedSpec {
    ArCorrelatedSpec {
        m,
        t_len,
        weights: WeightSpec::Shared(weights),
        noise_cov: diag(m, noise_var),
        burn_in,
        seed,
    }
}

/// Criterion 1: the numerical TV oracle stays below the closed-form mixing
/// bound (max of the two published constants) for sigma in
/// {0.05, 0.1, 0.2, 0.29} at sigma0 = 0.3, with certified grid tolerance
/// 1e-4; also records whether the statement constant alone suffices.
#[test]
fn acceptance_01_mixing_bound_vs_tv_oracle() {
    let t0 = std::time::Instant::now();
    let sigma0 = 0.3;
    let mut statement_alone = true;
    for &sigma in &[0.05, 0.1, 0.2, 0.29] {
        let tv = numeric_tv_bivariate_gaussian(sigma, 8.0, 0.005).unwrap();
        assert!(
            tv.tolerance.unwrap() <= 1e-4,
            "grid tolerance {} above certification at sigma {sigma}",
            tv.tolerance.unwrap()
        );
        let pair = analytic_beta_pair(sigma, sigma0).unwrap();
        assert!(
            tv.value <= pair.max(),
            "sigma {sigma}: TV {} exceeds closed-form bound {}",
            tv.value,
            pair.max()
        );
        if tv.value > pair.statement_value {
            statement_alone = false;
        }
    }
    println!(
        "ACCEPTANCE-01 mixing bound vs TV oracle: PASS (statement constant alone sufficient: {statement_alone}; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 2: expected-discrepancy null tests at n_trials = 2000 for (a)
/// a stationary AR(1), (b) a covariance-stationary AR(2) with squared loss,
/// (c) a phase-uniform periodic tent; each |estimate| <= 3 stderr + 0.02.
#[test]
fn acceptance_02_expected_discrepancy_null_tests() {
    let budget = OptBudget::default();
    let cases: Vec<(&str, ProcessSpec, HypothesisClass, BoundedLoss)> = vec![
        (
            "stationary_ar1",
            ProcessSpec::ArCorrelated(ar_spec(4, 10, vec![0.5], 0.04, 200, 21)),
            HypothesisClass::linear(2, 1.0),
            BoundedLoss::absolute(),
        ),
        (
            "covariance_stationary_ar2",
            ProcessSpec::ArCorrelated(ar_spec(4, 10, vec![0.4, 0.2], 0.04, 300, 22)),
            HypothesisClass::linear(3, 1.0),
            BoundedLoss::squared(),
        ),
        (
            "phase_uniform_tent",
            ProcessSpec::Tent(TentSpec {
                m: 4,
                t_len: 12,
                b_range: (0.0, 1.0),
                phase_mode: TentPhaseMode::UniformOverPeriod,
                seed: 23,
            }),
            HypothesisClass::linear(2, 1.0),
            BoundedLoss::squared(),
        ),
    ];
    for (label, spec, class, loss) in cases {
        let case_start = std::time::Instant::now();
        let est = delta_e_mc(&spec, &class, &loss, 2000, &budget, 97).unwrap();
        let tol = 3.0 * est.stderr.unwrap() + 0.02;
        assert!(
            est.value.abs() <= tol,
            "{label}: delta_e {} above tolerance {tol}",
            est.value
        );
        println!(
            "ACCEPTANCE-02 null test {label}: PASS (delta_e {:.5} <= {:.5}; {:.1}s)",
            est.value,
            tol,
            elapsed_secs(case_start)
        );
    }
}

/// Criterion 3: the optimizer's symmetric discrepancy matches the spectral
/// closed form within 1% relative error on 20 seeded panels with clipping
/// inactive.
#[test]
fn acceptance_03_optimizer_matches_spectral_closed_form() {
    let t0 = std::time::Instant::now();
    let loss = BoundedLoss::squared();
    let budget = OptBudget::default();
    let mut case = 0u64;
    let mut worst_rel: f64 = 0.0;
    for &m in &[20usize, 100] {
        for &p in &[2usize, 5] {
            for rep in 0..5u64 {
                case += 1;
                let weights = match p {
                    2 => vec![0.35, 0.15],
                    _ => vec![0.25, 0.15, 0.1, 0.05, 0.05],
                };
                let spec = ar_spec(m, 12, weights, 0.0025, 120, 1000 + 17 * case + rep);
                let panel = seqbound_core::processes::simulate_ar_panel(&spec).unwrap();
                let exact = delta_s_linear_exact(&panel, 1.0, p, &loss).unwrap();
                assert_eq!(
                    exact.clipped_at_argmax,
                    Some(false),
                    "case {case}: clipping active, configuration invalid"
                );
                let class = HypothesisClass::linear(p, 1.0);
                let opt = delta_s(&panel, &class, &loss, &budget, derive_seed(7, case)).unwrap();
                let rel = (opt.value - exact.value).abs() / exact.value.max(1e-12);
                worst_rel = worst_rel.max(rel);
                assert!(
                    rel < 0.01,
                    "case {case} (m={m}, p={p}): optimizer {} vs exact {} (rel {rel})",
                    opt.value,
                    exact.value
                );
            }
        }
    }
    println!(
        "ACCEPTANCE-03 optimizer vs spectral closed form: PASS (20 cases, worst relative error {worst_rel:.2e}; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 4: independent-series bound coverage over 500 repetitions at
/// m = 200, T = 10, unit noise, delta = 0.1 is at least 0.90.
#[test]
fn acceptance_04_thm2_coverage() {
    let t0 = std::time::Instant::now();
    let cfg = ExperimentConfig {
        process: Some(ProcessSpec::ArCorrelated(ar_spec(
            200,
            10,
            vec![0.5],
            1.0,
            100,
            31,
        ))),
        class: Some(HypothesisClass::Linear(LinearClass {
            window: 9,
            lambda_cap: 1.0,
        })),
        theorem: Some("thm2_independent".into()),
        delta: Some(0.1),
        n_repetitions: Some(500),
        ridge: Some(1e-6),
        seed: Some(32),
        ..ExperimentConfig::default()
    };
    let out = commands::validate::run(&cfg).unwrap();
    let coverage = out.result["coverage"].as_f64().unwrap();
    let valid = out.result["valid_trials"].as_u64().unwrap();
    assert_eq!(valid, 500, "some trials unexpectedly invalid");
    assert!(coverage >= 0.90, "coverage {coverage} below 0.90");
    println!(
        "ACCEPTANCE-04 thm2 coverage: PASS (coverage {coverage:.3} over {valid} trials; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 5: partition-bound coverage on hierarchical panels (depth 6,
/// cut depth 3, T = 10, 200 repetitions, delta = 0.2) is at least 0.80, and
/// setting delta exactly at the mixing mass invalidates the bound.
#[test]
fn acceptance_05_thm1_coverage_hierarchical() {
    let t0 = std::time::Instant::now();
    let depth = 6u32;
    let m = 1usize << depth;
    let cov = hierarchical_covariance(depth, m as f64).unwrap().matrix;
    let ar = ArCorrelatedSpec {
        m,
        t_len: 10,
        weights: WeightSpec::Shared(vec![0.3, 0.2]),
        noise_cov: cov.clone(),
        burn_in: 150,
        seed: 41,
    };
    let cfg = ExperimentConfig {
        process: Some(ProcessSpec::ArCorrelated(ar)),
        class: Some(HypothesisClass::Linear(LinearClass {
            window: 9,
            lambda_cap: 1.0,
        })),
        theorem: Some("thm1_s2s".into()),
        partition: Some(PartitionConfig::Hierarchical {
            depth,
            cut_depth: 3,
        }),
        delta: Some(0.2),
        n_repetitions: Some(200),
        ridge: Some(1e-6),
        seed: Some(42),
        ..ExperimentConfig::default()
    };
    let out = commands::validate::run(&cfg).unwrap();
    let coverage = out.result["coverage"].as_f64().unwrap();
    let valid = out.result["valid_trials"].as_u64().unwrap();
    assert_eq!(valid, 200, "some trials unexpectedly invalid");
    assert!(coverage >= 0.80, "coverage {coverage} below 0.80");

    // boundary: delta at exactly the mixing mass must invalidate
    let partition = seqbound_core::partitions::hierarchical_partition(depth, 3).unwrap();
    let betas: Vec<f64> = seqbound_core::mixing::collection_beta(&cov, &partition)
        .unwrap()
        .iter()
        .map(|b| b.value)
        .collect();
    let mass = bounds::beta_mass(&partition.sizes(), &betas).unwrap();
    assert!(mass > 0.0 && mass < 0.2);
    let boundary = bounds::thm1_s2s_bound(
        &Ingredient::new(0.0, "test"),
        &Ingredient::new(0.0, "test"),
        &partition.sizes(),
        &betas,
        mass,
        1.0,
    )
    .unwrap();
    assert!(!boundary.valid, "bound must be invalid at delta = beta mass");
    println!(
        "ACCEPTANCE-05 thm1 coverage (hierarchical): PASS (coverage {coverage:.3}, boundary invalidates at mass {mass:.2e}; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 6: regime prediction. At (m=500, T=10) sequence-to-sequence
/// beats local by oracle risk in at least 70% of seeds; at (m=10, T=500)
/// local wins at least 70%; the advisor agrees with the risk winner in at
/// least 60% of seeds per cell.
#[test]
fn acceptance_06_regime_prediction() {
    let t0 = std::time::Instant::now();
    let cfg = ExperimentConfig {
        cells: Some(vec![
            RegimeCell { m: 500, t_len: 10 },
            RegimeCell { m: 10, t_len: 500 },
        ]),
        seeds_per_cell: Some(20),
        delta: Some(0.1),
        seed: Some(51),
        ..ExperimentConfig::default()
    };
    let out = commands::regime::run(&cfg).unwrap();
    let cells = out.result["cells"].as_array().unwrap();
    let s2s_cell = &cells[0];
    let local_cell = &cells[1];
    let f1 = s2s_cell["frac_seq2seq_beats_local"].as_f64().unwrap();
    let f2 = local_cell["frac_local_beats_seq2seq"].as_f64().unwrap();
    let a1 = s2s_cell["frac_advisor_agrees"].as_f64().unwrap();
    let a2 = local_cell["frac_advisor_agrees"].as_f64().unwrap();
    assert!(f1 >= 0.70, "seq2seq wins only {f1} at (500, 10)");
    assert!(f2 >= 0.70, "local wins only {f2} at (10, 500)");
    assert!(a1 >= 0.60, "advisor agreement {a1} at (500, 10)");
    assert!(a2 >= 0.60, "advisor agreement {a2} at (10, 500)");
    println!(
        "ACCEPTANCE-06 regime prediction: PASS (s2s {f1:.2} at m>>T, local {f2:.2} at T>>m, agreement {a1:.2}/{a2:.2}; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 7: tent counterexample. Two-point phase: s2s expected
/// discrepancy <= 0.02 while the mean local discrepancy (offset class,
/// brute-force grid) >= 0.05. Drift: mean local discrepancy <= 0.02 while
/// the s2s estimate >= 0.05.
#[test]
fn acceptance_07_tent_counterexample() {
    let t0 = std::time::Instant::now();
    let cfg = ExperimentConfig {
        tent: Some(TentExampleConfig::default()),
        seed: Some(61),
        ..ExperimentConfig::default()
    };
    let out = commands::tent_example::run(&cfg).unwrap();
    let rows = out.result["rows"].as_array().unwrap();
    let two_point = &rows[0];
    let drift = &rows[1];
    let tp_s2s = two_point["s2s_delta_e"].as_f64().unwrap();
    let tp_local = two_point["mean_local_discrepancy"].as_f64().unwrap();
    let dr_s2s = drift["s2s_delta_e"].as_f64().unwrap();
    let dr_local = drift["mean_local_discrepancy"].as_f64().unwrap();
    assert!(tp_s2s <= 0.02, "two-point s2s discrepancy {tp_s2s} above 0.02");
    assert!(tp_local >= 0.05, "two-point local discrepancy {tp_local} below 0.05");
    assert!(dr_local <= 0.02, "drift local discrepancy {dr_local} above 0.02");
    assert!(dr_s2s >= 0.05, "drift s2s discrepancy {dr_s2s} below 0.05");
    println!(
        "ACCEPTANCE-07 tent counterexample: PASS (two-point s2s {tp_s2s:.4} / local {tp_local:.4}; drift s2s {dr_s2s:.4} / local {dr_local:.4}; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 8: the independence-surrogate inequality holds exactly on 100
/// random 4-state joint distributions.
#[test]
fn acceptance_08_independence_surrogate_inequality() {
    let t0 = std::time::Instant::now();
    let cfg = ExperimentConfig {
        yu_states: Some(4),
        yu_seeds: Some(100),
        seed: Some(71),
        ..ExperimentConfig::default()
    };
    let out = commands::yu_check::run(&cfg).unwrap();
    assert!(
        out.result["all_hold"].as_bool().unwrap(),
        "inequality failed on some case"
    );
    let n = out.result["n_cases"].as_u64().unwrap();
    assert!(n >= 100);
    println!(
        "ACCEPTANCE-08 independence surrogate inequality: PASS ({n} cases; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 9: the triangle-inequality chain
/// delta_oracle <= delta_s + L(h | Y) + L(h | Y') holds for 50 sampled
/// hypotheses on each of 10 seeded panels with absolute loss, up to
/// Monte-Carlo slack.
#[test]
fn acceptance_09_triangle_chain() {
    let t0 = std::time::Instant::now();
    let loss = BoundedLoss::absolute();
    let class = HypothesisClass::linear(2, 1.0);
    let mut checked = 0usize;
    for panel_seed in 0..10u64 {
        let ar = ar_spec(20, 10, vec![0.4], 0.04, 150, 800 + panel_seed);
        let spec = ProcessSpec::ArCorrelated(ar.clone());
        let panel = seqbound_core::processes::simulate_ar_panel(&ar).unwrap();
        let oracle_est = delta_oracle(
            &spec,
            &panel,
            &class,
            &loss,
            ConditionalEstimator::MonteCarlo(2000),
            &OptBudget::light(),
            panel_seed,
        )
        .unwrap();
        let slack = 3.0 * oracle_est.stderr.unwrap() + 1e-9;
        let ds = delta_s(&panel, &class, &loss, &OptBudget::default(), panel_seed).unwrap();
        let sampler = seqbound_core::processes::ArSampler::new(&ar).unwrap();
        let t = panel.t_len();
        for h_idx in 0..50u64 {
            let params =
                seqbound_core::hypotheses::sample_member_seeded(&class, derive_seed(panel_seed, h_idx));
            let mut risk_full = 0.0;
            let mut risk_pref = 0.0;
            for i in 0..panel.m() {
                let row = panel.row(i);
                let pf = class.predict(&params, row).unwrap();
                let pp = class.predict(&params, &row[..t - 1]).unwrap();
                risk_full += loss.expected_gaussian(
                    pf,
                    sampler.conditional_mean(i, row),
                    sampler.conditional_std(i),
                );
                risk_pref += loss.expected_gaussian(
                    pp,
                    sampler.conditional_mean(i, &row[..t - 1]),
                    sampler.conditional_std(i),
                );
            }
            risk_full /= panel.m() as f64;
            risk_pref /= panel.m() as f64;
            let rhs = ds.value + risk_full + risk_pref + slack;
            assert!(
                oracle_est.value <= rhs,
                "panel {panel_seed}, h {h_idx}: {} > {rhs}",
                oracle_est.value
            );
            checked += 1;
        }
    }
    println!(
        "ACCEPTANCE-09 triangle chain: PASS ({checked} hypothesis checks; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 10: every subcommand run twice with the same config yields
/// byte-identical reports.
#[test]
fn acceptance_10_determinism() {
    let t0 = std::time::Instant::now();
    let dir = std::env::temp_dir().join("seqbound_acceptance_determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let bin = env!("CARGO_BIN_EXE_seqbound");

    let mut noise = vec![0.0; 9];
    for i in 0..3 {
        noise[i * 3 + i] = 0.04;
    }
    let ar = serde_json::json!({
        "type": "ar_correlated", "m": 3, "t_len": 8,
        "weights": {"shared": [0.4]},
        "noise_cov": {"rows": 3, "cols": 3, "data": noise},
        "burn_in": 50, "seed": 5
    });
    let linear2 = serde_json::json!({"family": "linear", "window": 2, "lambda_cap": 1.0});
    let configs: Vec<(&str, serde_json::Value)> = vec![
        ("simulate", serde_json::json!({"process": ar})),
        (
            "estimate-discrepancy",
            serde_json::json!({"process": ar, "estimator": "delta_s", "class": linear2,
                               "opt_restarts": 2, "opt_iters": 30, "seed": 9}),
        ),
        (
            "estimate-mixing",
            serde_json::json!({"estimator": "numeric_tv", "sigma": 0.2,
                               "grid_halfwidth": 5.0, "grid_step": 0.05}),
        ),
        (
            "estimate-complexity",
            serde_json::json!({"process": ar, "estimator": "linear_closed_form",
                               "class": linear2}),
        ),
        (
            "evaluate-bounds",
            serde_json::json!({"theorem": "thm2_independent", "delta": 0.1,
                               "bound_inputs": {"max_rademacher": 0.1, "discrepancy": 0.05, "m": 64}}),
        ),
        (
            "validate-bound",
            serde_json::json!({"process": ar, "theorem": "thm2_independent", "delta": 0.2,
                               "n_repetitions": 3, "seed": 13, "format": "csv",
                               "class": {"family": "linear", "window": 7, "lambda_cap": 1.0}}),
        ),
        (
            "regime-experiment",
            serde_json::json!({"cells": [{"m": 12, "t_len": 8}], "seeds_per_cell": 2,
                               "delta": 0.2, "seed": 14}),
        ),
        (
            "advise",
            serde_json::json!({"process": ar, "delta": 0.2, "lag": 2, "seed": 15}),
        ),
        (
            "yu-check",
            serde_json::json!({"yu_states": 3, "yu_seeds": 5, "seed": 16}),
        ),
        (
            "tent-example",
            serde_json::json!({"seed": 17, "tent": {
                "t_len": 12, "m_local": 20, "trial_m": 2, "b_lo": 0.5, "b_hi": 1.0,
                "two_point_cap": 0.25, "drift_cap": 0.2, "n_trials": 40},
                "opt_restarts": 2, "opt_iters": 30}),
        ),
    ];

    for (command, mut config) in configs {
        let slug = command.replace('-', "_");
        let mut outputs = Vec::new();
        for round in 0..2 {
            let out_path = dir.join(format!("{slug}_{round}.json"));
            // simulate writes the panel to `out`; keep both rounds separate
            config["out"] = serde_json::json!(out_path.to_str().unwrap());
            let cfg_path = dir.join(format!("{slug}_{round}.config.json"));
            std::fs::write(&cfg_path, serde_json::to_string(&config).unwrap()).unwrap();
            let status = std::process::Command::new(bin)
                .arg(command)
                .arg("--config")
                .arg(&cfg_path)
                .output()
                .unwrap();
            assert!(
                status.status.success(),
                "{command} failed: {}",
                String::from_utf8_lossy(&status.stderr)
            );
            let mut bytes = std::fs::read(&out_path).unwrap();
            // the report embeds its own output path; normalize it away so
            // the two rounds are comparable
            let text = String::from_utf8(bytes.clone())
                .unwrap()
                .replace(&format!("{slug}_{round}"), "{OUT}");
            bytes = text.into_bytes();
            outputs.push(bytes);
        }
        assert_eq!(
            outputs[0], outputs[1],
            "{command}: reports differ between identical runs"
        );
    }
    println!(
        "ACCEPTANCE-10 determinism: PASS (10 subcommands byte-identical; {:.1}s)", elapsed_secs(t0)
    );
}

/// Criterion 11: scaling laws. The local bound's confidence term with
/// alpha = 1/sqrt(T) has log-log slope -0.5 +/- 0.1 in T; the partition
/// bound's Rademacher term has slope -0.5 +/- 0.1 in m at fixed T.
#[test]
fn acceptance_11_scaling_laws() {
    let t0 = std::time::Instant::now();
    // slope in T of the thm3 confidence term
    let ts = [50usize, 100, 200, 400, 800, 1600];
    let mut log_t = Vec::new();
    let mut log_term = Vec::new();
    for &t in &ts {
        let alpha = 1.0 / (t as f64).sqrt();
        let covering =
            seqbound_core::complexity::linear_seq_covering_log(alpha, 1.0, 1.0, 2, t).unwrap();
        let report = bounds::thm3_local_bound(
            &Ingredient::new(0.0, "test"),
            alpha,
            t,
            100,
            &Ingredient::new(covering.value, "surrogate"),
            0.05,
            1.0,
        )
        .unwrap();
        let conf = report.terms["confidence_term"].value;
        log_t.push((t as f64).ln());
        log_term.push(conf.ln());
    }
    let slope_t = regression_slope(&log_t, &log_term);
    assert!(
        (slope_t + 0.5).abs() <= 0.1,
        "thm3 confidence-term slope {slope_t} outside -0.5 +/- 0.1"
    );

    // slope in m of the thm1 Rademacher term at fixed T (data-driven)
    let ms = [64usize, 128, 256, 512, 1024, 2048];
    let mut log_m = Vec::new();
    let mut log_rad = Vec::new();
    let loss = BoundedLoss::squared();
    for &m in &ms {
        let spec = ar_spec(m, 10, vec![0.4], 0.09, 100, 90);
        let panel = seqbound_core::processes::simulate_ar_panel(&spec).unwrap();
        let examples = panel.seq2seq_examples();
        let class = HypothesisClass::linear(9, 1.0);
        let rad = seqbound_cli::oracle::rademacher_ingredient_whole(&examples, 1.0, &class, &loss)
            .unwrap();
        log_m.push((m as f64).ln());
        log_rad.push(rad.value.ln());
    }
    let slope_m = regression_slope(&log_m, &log_rad);
    assert!(
        (slope_m + 0.5).abs() <= 0.1,
        "thm1 Rademacher-term slope {slope_m} outside -0.5 +/- 0.1"
    );
    println!(
        "ACCEPTANCE-11 scaling laws: PASS (thm3 slope {slope_t:.3}, thm1 slope {slope_m:.3}; {:.1}s)", elapsed_secs(t0)
    );
}
