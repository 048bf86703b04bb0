use proptest::prelude::*;
use regmean::generator::{invert, Interval};
use regmean::mean::exp_mean_stable;
use regmean::{mean, power_mean, Direction, Generator};

fn builtins() -> Vec<(Generator, f64, f64)> {
    vec![
        (Generator::identity(), -50.0, 50.0),
        (Generator::log(), 1e-3, 1e3),
        (Generator::reciprocal(), 1e-3, 1e3),
        (Generator::power(2.0).unwrap(), 1e-3, 1e3),
        (Generator::power(0.5).unwrap(), 1e-3, 1e3),
        (Generator::exp(), -30.0, 30.0),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #[test]
    fn round_trip_inverse(u in 0.0f64..1.0) {
        for (g, lo, hi) in builtins() {
            let x = lo + u * (hi - lo);
            let back = g.inverse(g.forward(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 1e-9 * (1.0 + x.abs()), "{g}: {x} -> {back}");
        }
    }

    #[test]
    fn strictly_monotone_in_stated_direction(u in 0.0f64..1.0, v in 0.0f64..1.0) {
        prop_assume!(u != v);
        let (u, v) = (u.min(v), u.max(v));
        for (g, lo, hi) in builtins() {
            let (x1, x2) = (lo + u * (hi - lo), lo + v * (hi - lo));
            prop_assume!(x1 < x2);
            let (y1, y2) = (g.forward(x1).unwrap(), g.forward(x2).unwrap());
            prop_assert!(y1 != y2);
            match g.direction() {
                Direction::Increasing => prop_assert!(y1 < y2),
                Direction::Decreasing => prop_assert!(y1 > y2),
            }
        }
    }

    #[test]
    fn internality(xs in prop::collection::vec(0.01f64..100.0, 1..40)) {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for g in [Generator::identity(), Generator::log(), Generator::reciprocal(), Generator::power(3.0).unwrap()] {
            let m = mean(&g, &xs).unwrap();
            prop_assert!(m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12), "{g}: {m} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn harmonic_geometric_arithmetic_chain(xs in prop::collection::vec(0.01f64..100.0, 1..40)) {
        let hm = mean(&Generator::reciprocal(), &xs).unwrap();
        let gm = mean(&Generator::log(), &xs).unwrap();
        let am = mean(&Generator::identity(), &xs).unwrap();
        let slack = 1e-12 * am;
        prop_assert!(hm <= gm + slack && gm <= am + slack, "{hm} {gm} {am}");
        let all_equal = xs.iter().all(|&v| v == xs[0]);
        if !all_equal {
            let spread = (am - hm) / am;
            // strict inequality once the sample is visibly spread out
            if spread > 1e-9 {
                prop_assert!(hm < gm && gm < am);
            }
        } else {
            prop_assert_eq!(hm, am);
        }
    }

    #[test]
    fn power_mean_nondecreasing_in_p(
        xs in prop::collection::vec(0.01f64..100.0, 2..30),
        mut ps in prop::collection::vec(-20.0f64..20.0, 2..8),
    ) {
        ps.sort_by(f64::total_cmp);
        let values: Vec<f64> = ps.iter().map(|&p| power_mean(p, &xs).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-12), "{values:?} at {ps:?}");
        }
    }

    #[test]
    fn permutation_invariance(xs in prop::collection::vec(0.01f64..100.0, 2..40), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = xs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        for g in [Generator::identity(), Generator::log(), Generator::reciprocal(), Generator::power(0.5).unwrap()] {
            let a = mean(&g, &xs).unwrap();
            let b = mean(&g, &shuffled).unwrap();
            prop_assert!(rel(a, b) <= 1e-12, "{g}: {a} vs {b}");
        }
    }

    #[test]
    fn stable_exp_mean_matches_naive(xs in prop::collection::vec(-20.0f64..20.0, 1..40)) {
        let naive = mean(&Generator::exp(), &xs).unwrap();
        let stable = exp_mean_stable(&xs).unwrap();
        prop_assert!((naive - stable).abs() <= 1e-10 * (1.0 + stable.abs()), "{naive} vs {stable}");
    }

    #[test]
    fn affine_images_give_the_same_mean(
        xs in prop::collection::vec(0.1f64..10.0, 1..30),
        a in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
        b in -10.0f64..10.0,
    ) {
        for g in [Generator::identity(), Generator::log(), Generator::reciprocal(), Generator::power(2.0).unwrap()] {
            let h = g.affine(a, b).unwrap();
            let (mg, mh) = (mean(&g, &xs).unwrap(), mean(&h, &xs).unwrap());
            prop_assert!((mg - mh).abs() <= 1e-9 * (1.0 + mg.abs()), "{g}: {mg} vs {mh}");
        }
    }

    #[test]
    fn replacement_chain_reaches_a_fixed_point(xs in prop::collection::vec(0.1f64..10.0, 2..12)) {
        for g in [Generator::log(), Generator::reciprocal(), Generator::power(2.0).unwrap()] {
            let target = mean(&g, &xs).unwrap();
            let mut x = xs.clone();
            for n0 in 2..=x.len() {
                let m = mean(&g, &x[..n0]).unwrap();
                x[..n0].iter_mut().for_each(|v| *v = m);
                let after = mean(&g, &x).unwrap();
                prop_assert!(rel(after, target) <= 1e-10, "{g} n0={n0}: {after} vs {target}");
            }
            prop_assert!(x.iter().all(|&v| rel(v, target) <= 1e-10));
            let again = mean(&g, &x).unwrap();
            prop_assert!(rel(again, target) <= 1e-10);
        }
    }
}

#[test]
fn numeric_inverse_agrees_with_closed_form() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for (g, lo, hi) in builtins() {
        let bracket = Interval::new(lo, hi).unwrap();
        for _ in 0..1000 {
            let x = rng.random_range(lo..hi);
            let y = g.forward(x).unwrap();
            // residual target equivalent to 1e-11·(1 + |x|) in x
            let tol = 1e-11 * g.derivative(x).unwrap().abs() * (1.0 + x.abs());
            let numeric = invert(&g, y, bracket, tol).unwrap();
            let closed = g.inverse(y).unwrap();
            assert!((numeric - closed).abs() <= 1e-9 * (1.0 + closed.abs()), "{g}: {numeric} vs {closed}");
        }
    }
}

#[test]
fn single_value_and_constant_samples() {
    for (g, lo, _) in builtins() {
        let v = lo + 0.5;
        assert_eq!(mean(&g, &[v]).unwrap(), v);
        assert_eq!(mean(&g, &[v; 7]).unwrap(), v);
    }
}

#[test]
fn exp_mean_survives_huge_inputs() {
    let m = exp_mean_stable(&[700.0, 710.0, 705.0]).unwrap();
    assert!(m.is_finite() && m > 705.0 && m < 710.0);
    assert!(mean(&Generator::exp(), &[800.0, 801.0]).is_err());
}

#[test]
fn zero_is_outside_the_open_domains() {
    for g in [Generator::log(), Generator::reciprocal(), Generator::power(2.0).unwrap()] {
        assert!(g.forward(0.0).is_err(), "{g}");
        assert!(mean(&g, &[0.0, 1.0]).is_err(), "{g}");
    }
}
