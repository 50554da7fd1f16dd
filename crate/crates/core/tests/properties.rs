mod common;

use proptest::prelude::*;
use rand::Rng;

use common::GraphParams;
use semibreak_core::json;
use semibreak_core::rational::rat;
use semibreak_core::{
    apply_certificate, degree_on, error_of_set, fire_set, semibreak_reduce, Error,
    FiringStep, ReduceOptions,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divisor_arithmetic_cancels(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (graph, a) = common::random_instance(&mut rng, &GraphParams::default());
        let b = common::random_effective(&mut rng, &graph, 3, false);
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!((&a + &b).degree(), a.degree() + b.degree());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn firing_preserves_degree_and_reverses(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (graph, d) = common::random_instance(&mut rng, &GraphParams::default());
        let model = common::random_model(&mut rng, &graph, 2);
        let set = common::random_closed_set(&mut rng, &model);
        prop_assume!(!set.is_empty() && !set.is_full());
        let limit = match set.distance_to_outside_branch_points().unwrap() {
            Some(limit) => limit,
            None => rat(1, 2),
        };
        let eps = limit * rat(1, rng.gen_range(2..=4));
        let fired = match fire_set(&d, &set, &eps) {
            Ok(f) => f,
            Err(Error::NotConvex) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("firing failed: {e}"))),
        };
        prop_assert_eq!(fired.degree(), d.degree());
        // chips only move inside the closed eps-fattening of the set
        let fat = set.fatten(&eps).unwrap();
        let moved = &fired - &d;
        prop_assert!(moved.support().all(|p| fat.contains_point(p)));
        prop_assert!(degree_on(&moved, &set) <= 0);
        let step = FiringStep::new(set, eps);
        let back = step.reversed().unwrap().apply(&fired).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn reduction_certificate_replays_and_round_trips(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (graph, d) = common::random_instance(&mut rng, &GraphParams::default());
        let result = semibreak_reduce(&graph, &d, ReduceOptions::default()).unwrap();
        prop_assert_eq!(apply_certificate(&d, &result.certificate).unwrap(), result.semibreak.clone());
        let doc = json::reduction_to_json(&graph, &result);
        let text = json::to_pretty(&doc);
        let parsed: json::ReductionJson = json::parse(&text).unwrap();
        let back = json::reduction_from_json(&graph, &parsed).unwrap();
        prop_assert_eq!(&back.semibreak, &result.semibreak);
        prop_assert_eq!(&back.break_divisor, &result.break_divisor);
        prop_assert_eq!(&back.certificate, &result.certificate);
        let reversed = result.certificate.reversed().unwrap();
        prop_assert_eq!(apply_certificate(&result.semibreak, &reversed).unwrap(), d);
    }

    #[test]
    fn divisor_json_round_trips(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (graph, d) = common::random_instance(&mut rng, &GraphParams::default());
        let text = json::to_pretty(&json::divisor_to_json(&graph, &d));
        prop_assert_eq!(json::parse_divisor(&graph, &text).unwrap(), d);
    }

    #[test]
    fn set_json_round_trips(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let graph = common::random_graph(&mut rng, &GraphParams::default());
        let model = common::random_model(&mut rng, &graph, 3);
        let set = common::random_closed_set(&mut rng, &model);
        let back = json::set_from_json(&graph, &json::set_to_json(&set)).unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn psi_and_error_are_modular(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (graph, d) = common::random_instance(&mut rng, &GraphParams::default());
        let model = common::random_model(&mut rng, &graph, 2);
        let a = common::random_closed_set(&mut rng, &model);
        let b = common::random_closed_set(&mut rng, &model);
        let (union, meet) = (a.union(&b).unwrap(), a.intersection(&b).unwrap());
        prop_assert_eq!(union.psi() + meet.psi(), a.psi() + b.psi());
        prop_assert_eq!(
            error_of_set(&d, &union) + error_of_set(&d, &meet),
            error_of_set(&d, &a) + error_of_set(&d, &b)
        );
    }

    #[test]
    fn convex_hull_is_idempotent_and_grows(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let graph = common::random_graph(&mut rng, &GraphParams::default());
        let model = common::random_model(&mut rng, &graph, 3);
        let set = common::random_closed_set(&mut rng, &model);
        let hull = set.convex_hull();
        prop_assert!(set.is_subset_of(&hull).unwrap());
        prop_assert!(hull.is_convex());
        prop_assert_eq!(hull.convex_hull(), hull.clone());
        prop_assert_eq!(hull.psi(), set.psi() - set.diff_count() as i64);
    }
}

#[test]
fn random_break_divisors_are_break() {
    let mut rng = common::rng(7);
    for _ in 0..40 {
        let graph = common::random_graph(&mut rng, &GraphParams::default());
        let d = common::random_break_divisor(&mut rng, &graph);
        assert_eq!(d.degree(), graph.genus() as i64);
        assert!(semibreak_core::is_break(&graph, &d, Default::default()).unwrap());
    }
}
