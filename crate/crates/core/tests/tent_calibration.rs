//! One-off calibration runs for the tent counterexample fixture. Ignored by
//! default; run with `cargo test -p seqbound-core --test tent_calibration
//! -- --ignored --nocapture` to print candidate configuration values.

use seqbound_core::discrepancy::{delta_e_mc, mean_delta_local};
use seqbound_core::hypotheses::{BoundedLoss, HypothesisClass};
use seqbound_core::optim::OptBudget;
use seqbound_core::processes::{ProcessSpec, TentPhaseMode, TentSpec};

#[test]
#[ignore]
fn calibrate_tent_example() {
    let t_len = 24usize;
    for (label, mode, class) in [
        (
            "two_point / linear p=1 cap=0.25",
            TentPhaseMode::TwoPoint,
            HypothesisClass::linear(1, 0.25),
        ),
        (
            "two_point / linear p=1 cap=0.3",
            TentPhaseMode::TwoPoint,
            HypothesisClass::linear(1, 0.3),
        ),
        (
            "drift / linear p=T-1 cap=0.2",
            TentPhaseMode::DriftHalfPeriod,
            HypothesisClass::linear(t_len - 1, 0.2),
        ),
        (
            "drift / linear p=T-1 cap=0.15",
            TentPhaseMode::DriftHalfPeriod,
            HypothesisClass::linear(t_len - 1, 0.15),
        ),
        (
            "two_point / linear p=T-1 cap=0.2 (cross-check)",
            TentPhaseMode::TwoPoint,
            HypothesisClass::linear(t_len - 1, 0.2),
        ),
    ] {
        let spec = ProcessSpec::Tent(TentSpec {
            m: 8,
            t_len,
            b_range: (0.5, 1.0),
            phase_mode: mode,
            seed: 1,
        });
        let est = delta_e_mc(
            &spec,
            &class,
            &BoundedLoss::squared(),
            1000,
            &OptBudget::default(),
            42,
        )
        .unwrap();
        println!(
            "delta_e[{label}] = {:.5} (stderr {:.5})",
            est.value,
            est.stderr.unwrap()
        );
    }

    for mode in [TentPhaseMode::TwoPoint, TentPhaseMode::DriftHalfPeriod] {
        let spec = ProcessSpec::Tent(TentSpec {
            m: 400,
            t_len,
            b_range: (0.5, 1.0),
            phase_mode: mode,
            seed: 7,
        });
        let panel = spec.simulate().unwrap();
        let mean = mean_delta_local(
            &spec,
            &panel,
            &HypothesisClass::offset(),
            &BoundedLoss::squared(),
            1,
            &OptBudget::light(),
            9,
        )
        .unwrap();
        println!("mean_delta_local[{mode:?}] = {mean:.5}");
    }
}
