//! Property tests of the model invariants: status exclusivity and the
//! determinate/indeterminate switch, exact frequency arithmetic, event
//! validation, the roulette partition, and the statistics helpers.

use num_rational::Ratio;
use proptest::prelude::*;

use eventsim::classical::{roulette_cell, roulette_cell_width_deg, ROULETTE_CELLS};
use eventsim::{
    bayesian_update, chi_square_gof, ks_distance, wilson_interval, BetaParams, Collective,
    Conditions, EventError, EventStructure, TrialStream,
};

fn arbitrary_event(max_outcomes: usize) -> impl Strategy<Value = EventStructure> {
    prop::collection::vec(1u32..1000, 2..=max_outcomes).prop_map(|weights| {
        let total: f64 = weights.iter().map(|&w| w as f64).sum();
        let pairs: Vec<(String, f64)> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (format!("o{i}"), w as f64 / total))
            .collect();
        EventStructure::new(Conditions::labeled("arb"), pairs).expect("normalized weights")
    })
}

proptest! {
    // Exactly one status at every (record, label, t); determinate from
    // t_omega on, indeterminate before for interior-probability labels.
    #[test]
    fn status_exclusivity_and_switch(
        event in arbitrary_event(6),
        seed in any::<u64>(),
        trial_index in 0u64..1000,
        t in 0u64..2000,
    ) {
        let record = event.sample_trial(&TrialStream::new(seed), trial_index);
        for index in 0..event.n_outcomes() {
            let status = record.status_at_index(&event, index, t);
            prop_assert!(status.is_determinate() != status.is_indeterminate());
            if t >= record.t_omega() {
                prop_assert!(status.is_determinate());
                let expected = u8::from(index == record.realized());
                prop_assert_eq!(status.determinate_value(), Some(expected));
            } else {
                let p = event.probability_at(index);
                if p > 0.0 && p < 1.0 {
                    prop_assert!(status.is_indeterminate());
                    prop_assert!((0.0..=1.0).contains(&status.probability()));
                }
            }
        }
    }

    // Frequencies are exact rationals in [0, 1] and sum to exactly 1.
    #[test]
    fn frequencies_are_exact_and_normalized(
        event in arbitrary_event(5),
        n in 1u64..500,
        seed in any::<u64>(),
    ) {
        let collective = Collective::run(&event, n, seed).unwrap();
        let mut total = Ratio::new(0u64, 1u64);
        for index in 0..event.n_outcomes() {
            let f = collective.frequency_at(index);
            prop_assert!(f.ratio() >= Ratio::new(0, 1));
            prop_assert!(f.ratio() <= Ratio::new(1, 1));
            prop_assert!((0.0..=1.0).contains(&f.value()));
            total += f.ratio();
        }
        prop_assert_eq!(total, Ratio::new(1, 1));
    }

    // Identical (model, n, seed) reproduce bit-identical collectives, and
    // a prefix equals the shorter run outright.
    #[test]
    fn collectives_are_reproducible_and_prefix_stable(
        event in arbitrary_event(4),
        n in 2u64..200,
        m in 1u64..200,
        seed in any::<u64>(),
    ) {
        let a = Collective::run(&event, n, seed).unwrap();
        let b = Collective::run(&event, n, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let m = m.min(n);
        prop_assert_eq!(a.prefix(m).unwrap(), Collective::run(&event, m, seed).unwrap());
    }

    // Probability maps are accepted exactly when they are well formed.
    #[test]
    fn event_validation_matches_the_contract(weights in prop::collection::vec(0.0f64..10.0, 1..6)) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 1e-3);
        let pairs: Vec<(String, f64)> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (format!("o{i}"), w / total))
            .collect();
        let sum: f64 = pairs.iter().map(|(_, p)| *p).sum();
        let result = EventStructure::new(Conditions::labeled("v"), pairs.clone());
        if (sum - 1.0).abs() <= 1e-12 {
            prop_assert!(result.is_ok());
        } else {
            prop_assert!(matches!(result, Err(EventError::ProbabilitySumMismatch(_))));
        }

        // shifting one probability off by more than the tolerance fails
        if pairs.len() >= 2 {
            let mut broken = pairs;
            broken[0].1 += 0.25;
            let rejected = matches!(
                EventStructure::new(Conditions::labeled("v"), broken),
                Err(EventError::ProbabilitySumMismatch(_))
                    | Err(EventError::InvalidProbability { .. })
            );
            prop_assert!(rejected);
        }
    }

    // Every angle lands in exactly one cell and the cell edges follow the
    // half-open convention n * 360/37 <= angle < (n+1) * 360/37.
    #[test]
    fn roulette_cells_partition_every_angle(angle in 0.0f64..360.0) {
        let cell = roulette_cell(angle).unwrap();
        prop_assert!(cell < ROULETTE_CELLS);
        let width = *roulette_cell_width_deg().numer() as f64
            / *roulette_cell_width_deg().denom() as f64;
        let lower = cell as f64 * width;
        let upper = (cell + 1) as f64 * width;
        // allow one ulp of slack on the computed edges themselves
        prop_assert!(angle >= lower - 1e-12);
        prop_assert!(angle < upper + 1e-12);
    }

    // Wilson interval width never widens as n grows at a fixed ratio.
    #[test]
    fn wilson_width_shrinks_with_n(
        successes in 0u64..50,
        n in 1u64..60,
        scale in 1u64..40,
        confidence in 0.5f64..0.999,
    ) {
        prop_assume!(successes <= n);
        let (lo1, hi1) = wilson_interval(successes, n, confidence).unwrap();
        let (lo2, hi2) = wilson_interval(successes * scale, n * scale, confidence).unwrap();
        prop_assert!(hi2 - lo2 <= hi1 - lo1 + 1e-12);
        prop_assert!((0.0..=1.0).contains(&lo1) && (0.0..=1.0).contains(&hi1));
    }

    // Uniformly rescaling the expected distribution changes nothing.
    #[test]
    fn chi_square_is_rescaling_invariant(
        observed in prop::collection::vec(1u64..200, 3..12),
        scale in 0.01f64..100.0,
    ) {
        let k = observed.len();
        let pdf = vec![1.0 / k as f64; k];
        let scaled: Vec<f64> = pdf.iter().map(|p| p * scale).collect();
        let a = chi_square_gof(&observed, &pdf).unwrap();
        let b = chi_square_gof(&observed, &scaled).unwrap();
        prop_assert_eq!(a.dof, b.dof);
        prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
        prop_assert!((a.p_value - b.p_value).abs() < 1e-9);
    }

    // The KS distance is always a number in [0, 1].
    #[test]
    fn ks_distance_is_bounded(
        observed in prop::collection::vec(0u64..100, 2..20),
    ) {
        prop_assume!(observed.iter().sum::<u64>() > 0);
        let k = observed.len();
        let pdf = vec![1.0 / k as f64; k];
        let d = ks_distance(&observed, &pdf).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    // Batch splits of a conjugate update compose exactly. Counts are
    // integers, so as long as the prior itself is exactly representable
    // (quarter steps here) every addition is exact and order drops out.
    #[test]
    fn bayes_update_composes(
        a4 in 1u32..80,
        b4 in 1u32..80,
        s1 in 0u64..1000,
        f1 in 0u64..1000,
        s2 in 0u64..1000,
        f2 in 0u64..1000,
    ) {
        let prior = BetaParams::new(a4 as f64 / 4.0, b4 as f64 / 4.0).unwrap();
        let split = bayesian_update(bayesian_update(prior, s1, f1), s2, f2);
        let joint = bayesian_update(prior, s1 + s2, f1 + f2);
        prop_assert_eq!(split, joint);
    }
}
