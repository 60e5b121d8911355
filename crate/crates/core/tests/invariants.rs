//! Property tests for the structural invariants: CSV round-trips are
//! bit-exact, losses stay in [0, cap], partitions stay disjoint covers,
//! hypotheses read only their trailing window, and the spectral closed form
//! scales quadratically.

use proptest::prelude::*;
use seqbound_core::discrepancy::delta_s_linear_exact;
use seqbound_core::hypotheses::{BoundedLoss, HypothesisClass, LossBase};
use seqbound_core::panel::TimeSeriesPanel;
use seqbound_core::partitions::hierarchical_partition;

fn finite_f64() -> impl Strategy<Value = f64> {
    // full-magnitude finite values, including negative zero and subnormals
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn csv_round_trip_bit_exact(
        rows in prop::collection::vec(
            prop::collection::vec(finite_f64(), 2..6), 1..5)
    ) {
        let t = rows[0].len();
        let rows: Vec<Vec<f64>> = rows.into_iter()
            .map(|mut r| { r.resize(t, 0.25); r })
            .collect();
        let panel = TimeSeriesPanel::from_values(rows).unwrap();
        let back = TimeSeriesPanel::from_csv(&panel.to_csv()).unwrap();
        for i in 0..panel.m() {
            for k in 0..t {
                prop_assert_eq!(panel.row(i)[k].to_bits(), back.row(i)[k].to_bits());
            }
        }
    }

    #[test]
    fn losses_stay_in_bounds(
        yhat in -1e6f64..1e6,
        y in -1e6f64..1e6,
        cap in 0.1f64..10.0,
        squared in any::<bool>()
    ) {
        let loss = BoundedLoss {
            base: if squared { LossBase::Squared } else { LossBase::Absolute },
            clip_cap: cap,
        };
        let v = loss.eval(yhat, y);
        prop_assert!((0.0..=cap).contains(&v));
    }

    #[test]
    fn hierarchical_partitions_disjoint_cover(depth in 1u32..8, cut_frac in 0.0f64..1.0) {
        let cut = (cut_frac * depth as f64).floor() as u32;
        let m = 1usize << depth;
        let part = hierarchical_partition(depth, cut).unwrap();
        let mut seen = vec![false; m];
        for set in part.index_sets() {
            prop_assert_eq!(set.len(), 1usize << (depth - cut));
            for &i in set {
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
        prop_assert_eq!(part.min_size(), 1usize << (depth - cut));
    }

    #[test]
    fn predict_reads_only_trailing_window(
        w in prop::collection::vec(-1.0f64..1.0, 1..5),
        input in prop::collection::vec(-1.0f64..1.0, 1..6),
        padding in prop::collection::vec(-1e3f64..1e3, 0..4)
    ) {
        let p = w.len().min(input.len());
        let w = &w[..p];
        let class = HypothesisClass::linear(p, 10.0);
        let base = class.predict(w, &input).unwrap();
        let mut padded = padding.clone();
        padded.extend_from_slice(&input);
        let shifted = class.predict(w, &padded).unwrap();
        prop_assert!((base - shifted).abs() < 1e-12);
    }

    #[test]
    fn spectral_closed_form_scales_quadratically(
        seed_rows in prop::collection::vec(
            prop::collection::vec(-0.5f64..0.5, 5), 2..6),
        scale in 0.1f64..3.0
    ) {
        let base = TimeSeriesPanel::from_values(seed_rows.clone()).unwrap();
        let scaled_rows: Vec<Vec<f64>> = seed_rows
            .iter()
            .map(|r| r.iter().map(|v| v * scale).collect())
            .collect();
        let scaled = TimeSeriesPanel::from_values(scaled_rows).unwrap();
        let loss = BoundedLoss { base: LossBase::Squared, clip_cap: 1e12 };
        let a = delta_s_linear_exact(&base, 1.0, 2, &loss).unwrap().value;
        let b = delta_s_linear_exact(&scaled, 1.0, 2, &loss).unwrap().value;
        prop_assert!((b - scale * scale * a).abs() <= 1e-9 * (1.0 + a));
    }
}
