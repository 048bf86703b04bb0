use proptest::prelude::*;
use regmean::stability::{
    shrinking_perturbations, stability_bound_parts, verify_stability, verify_stability_sampled, BOUND_SLACK,
};
use regmean::{mean, Error, Generator, Interval};

fn positive_generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        Just(Generator::identity()),
        Just(Generator::log()),
        Just(Generator::reciprocal()),
        Just(Generator::exp()),
        (0.25f64..4.0).prop_map(|p| Generator::power(p).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn measured_distance_respects_the_bound(
        g in positive_generator(),
        h in positive_generator(),
        lo in 0.2f64..3.0,
        width in 0.1f64..3.0,
    ) {
        let b = Interval::new(lo, lo + width).unwrap();
        let r = verify_stability(&g, &h, b, 2, 201).unwrap();
        prop_assert!(r.satisfied);
        prop_assert!(r.sup_mean_distance <= r.bound * (1.0 + BOUND_SLACK), "{g} vs {h}: {} > {}", r.sup_mean_distance, r.bound);
        prop_assert!(r.argmax.iter().all(|&x| b.contains(x)));
    }

    #[test]
    fn argmax_reproduces_the_reported_distance(g in positive_generator(), h in positive_generator()) {
        let b = Interval::new(1.0, 2.0).unwrap();
        let r = verify_stability(&g, &h, b, 2, 101).unwrap();
        let d = (mean(&g, &r.argmax).unwrap() - mean(&h, &r.argmax).unwrap()).abs();
        prop_assert!((d - r.sup_mean_distance).abs() <= 1e-12 * (1.0 + d));
    }
}

#[test]
fn bound_constant_is_asymmetric_only_through_l() {
    let b = Interval::new(1.0, 2.0).unwrap();
    let (g, h) = (Generator::identity(), Generator::power(2.0).unwrap());
    let gh = stability_bound_parts(&g, &h, b, 1001).unwrap();
    let hg = stability_bound_parts(&h, &g, b, 1001).unwrap();
    assert_eq!(gh.min_slope, hg.min_slope);
    assert_eq!(gh.generator_distance, hg.generator_distance);
    assert!((gh.lipschitz_inverse - 1.0).abs() < 1e-12);
    assert!((hg.lipschitz_inverse - 0.5).abs() < 1e-12);
    assert!(gh.bound_constant > hg.bound_constant);
}

#[test]
fn identical_generators_have_zero_distance() {
    let b = Interval::new(0.5, 4.0).unwrap();
    for g in [Generator::log(), Generator::reciprocal(), Generator::power(3.0).unwrap()] {
        let r = verify_stability(&g, &g, b, 3, 41).unwrap();
        assert_eq!(r.sup_mean_distance, 0.0);
        assert_eq!(r.bound, 0.0);
        assert!(r.satisfied);
    }
}

#[test]
fn sign_flip_leaves_the_mean_unchanged() {
    let b = Interval::new(0.5, 4.0).unwrap();
    let g = Generator::reciprocal();
    let r = verify_stability(&g, &g.affine(-1.0, 0.0).unwrap(), b, 2, 101).unwrap();
    assert!(r.sup_mean_distance <= 4.0 * f64::EPSILON * 4.0);
}

#[test]
fn perturbations_shrink_to_zero() {
    let b = Interval::new(1.0, 2.0).unwrap();
    let ts = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.0];
    for (g, h) in [
        (Generator::identity(), Generator::log()),
        (Generator::log(), Generator::reciprocal()),
        (Generator::power(0.5).unwrap(), Generator::exp()),
    ] {
        let path = shrinking_perturbations(&g, &h, b, 2, 101, &ts).unwrap();
        let d: Vec<f64> = path.iter().map(|(_, r)| r.sup_mean_distance).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0]), "{g} {h}: {d:?}");
        assert_eq!(*d.last().unwrap(), 0.0);
        assert!(path.iter().all(|(_, r)| r.satisfied));
    }
}

#[test]
fn random_points_for_larger_samples() {
    let b = Interval::new(1.0, 3.0).unwrap();
    let r = verify_stability_sampled(&Generator::log(), &Generator::identity(), b, 6, 201, 20_000, 42).unwrap();
    assert_eq!(r.sampling, "random");
    assert_eq!(r.points_evaluated, 20_000);
    assert!(r.satisfied && r.sup_mean_distance > 0.0);
    let again = verify_stability_sampled(&Generator::log(), &Generator::identity(), b, 6, 201, 20_000, 42).unwrap();
    assert_eq!(r, again);
}

#[test]
fn box_outside_the_domain_is_rejected() {
    let b = Interval::new(-1.0, 1.0).unwrap();
    let r = verify_stability(&Generator::log(), &Generator::identity(), b, 2, 11);
    assert!(matches!(r, Err(Error::Configuration(_))), "{r:?}");
}
