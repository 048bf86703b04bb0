use proptest::prelude::*;
use regmean::portfolio::{
    geometric_average_return, markowitz_approximation, summarize, wealth_path, ReturnSeries, VarianceDivisor,
};
use regmean::Error;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #[test]
    fn wealth_is_w0_times_geometric_power(
        returns in prop::collection::vec(-0.9f64..2.0, 1..200),
        w0 in 0.01f64..1e6,
    ) {
        let n = returns.len() as i32;
        let s = ReturnSeries::new(returns, w0).unwrap();
        let expected = w0 * geometric_average_return(&s).powi(n);
        prop_assert!(rel(wealth_path(&s), expected) <= 1e-12);
    }

    #[test]
    fn markowitz_gap_is_cubic_in_the_largest_return(returns in prop::collection::vec(-0.05f64..0.05, 1..300)) {
        let max = returns.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let s = ReturnSeries::new(returns, 1.0).unwrap();
        let gap = markowitz_approximation(&s, VarianceDivisor::Population) - geometric_average_return(&s);
        prop_assert!(gap.abs() <= 10.0 * max.powi(3), "gap {gap}, max {max}");
    }

    #[test]
    fn order_of_returns_does_not_matter(
        returns in prop::collection::vec(-0.5f64..0.5, 2..100),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = returns.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = ReturnSeries::new(returns, 1.0).unwrap();
        let b = ReturnSeries::new(shuffled, 1.0).unwrap();
        prop_assert!(rel(geometric_average_return(&a), geometric_average_return(&b)) <= 1e-14);
        for d in [VarianceDivisor::Population, VarianceDivisor::Unbiased] {
            prop_assert!(rel(markowitz_approximation(&a, d), markowitz_approximation(&b, d)) <= 1e-14);
        }
    }
}

#[test]
fn constant_returns() {
    let s = ReturnSeries::new(vec![0.05; 10], 100.0).unwrap();
    let sum = summarize(&s, VarianceDivisor::Population);
    assert!(rel(sum.geometric_gross, 1.05) < 1e-15);
    assert!(rel(sum.wealth, 100.0 * 1.05f64.powi(10)) < 1e-13);
    assert!((sum.geometric_net - 0.05).abs() < 1e-15);
    assert!((sum.markowitz - (0.05 - 0.5 * 0.0025f64).exp()).abs() < 1e-15);
}

#[test]
fn percent_inputs_are_scaled() {
    let a = ReturnSeries::from_percent(&[10.0, -5.0, 3.0], 1.0).unwrap();
    let b = ReturnSeries::new(vec![0.10, -0.05, 0.03], 1.0).unwrap();
    assert_eq!(geometric_average_return(&a), geometric_average_return(&b));
}

#[test]
fn total_loss_is_rejected() {
    for r in [vec![0.1, -1.0], vec![-1.5]] {
        assert!(matches!(ReturnSeries::new(r, 1.0), Err(Error::Domain { .. })));
    }
}
