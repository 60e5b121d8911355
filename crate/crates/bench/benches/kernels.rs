//! Criterion benchmarks for the numerical kernels with nontrivial cost: the
//! bivariate TV integral, the spectral symmetric-discrepancy closed form and
//! its optimizer counterpart, and correlated panel simulation.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use seqbound_core::discrepancy::{delta_s, delta_s_linear_exact};
use seqbound_core::hypotheses::{BoundedLoss, HypothesisClass};
use seqbound_core::mixing::numeric_tv_bivariate_gaussian;
use seqbound_core::optim::OptBudget;
use seqbound_core::processes::{
    hierarchical_covariance, simulate_ar_panel, ArCorrelatedSpec, WeightSpec,
};

fn bench_tv_integral(c: &mut Criterion) {
    c.bench_function("numeric_tv sigma=0.2 step=0.02", |b| {
        b.iter(|| numeric_tv_bivariate_gaussian(black_box(0.2), 6.0, 0.02).unwrap())
    });
}

fn demo_panel() -> seqbound_core::TimeSeriesPanel {
    let spec = ArCorrelatedSpec {
        m: 100,
        t_len: 12,
        weights: WeightSpec::Shared(vec![0.35, 0.15]),
        noise_cov: {
            let mut m = seqbound_core::linalg::Matrix::zeros(100, 100);
            for i in 0..100 {
                m[(i, i)] = 0.0025;
            }
            m
        },
        burn_in: 100,
        seed: 3,
    };
    simulate_ar_panel(&spec).unwrap()
}

fn bench_delta_s(c: &mut Criterion) {
    let panel = demo_panel();
    let loss = BoundedLoss::squared();
    c.bench_function("delta_s_linear_exact m=100 p=5", |b| {
        b.iter(|| delta_s_linear_exact(black_box(&panel), 1.0, 5, &loss).unwrap())
    });
    let class = HypothesisClass::linear(5, 1.0);
    let budget = OptBudget::light();
    c.bench_function("delta_s optimizer (light) m=100 p=5", |b| {
        b.iter(|| delta_s(black_box(&panel), &class, &loss, &budget, 7).unwrap())
    });
}

fn bench_simulate(c: &mut Criterion) {
    let cov = hierarchical_covariance(6, 64.0).unwrap().matrix;
    let spec = ArCorrelatedSpec {
        m: 64,
        t_len: 10,
        weights: WeightSpec::Shared(vec![0.3, 0.2]),
        noise_cov: cov,
        burn_in: 150,
        seed: 11,
    };
    c.bench_function("simulate_ar_panel hierarchical m=64 T=10", |b| {
        b.iter(|| simulate_ar_panel(black_box(&spec)).unwrap())
    });
}

criterion_group!(benches, bench_tv_integral, bench_delta_s, bench_simulate);
criterion_main!(benches);
