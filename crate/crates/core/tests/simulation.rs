use rand::Rng;
use regmean::distributions::rng_stream;
use regmean::figures::{figure1_generators, figure1_scenarios, figure2_distribution};
use regmean::simulation::{compare_edgeworth, histogram, ks_statistic, run_scenario, sample_skewness, ScenarioConfig};
use regmean::{g_moments, DistributionModel, Error, Generator, Interval, MomentMethod};

fn cell(dist: DistributionModel, g: Generator, n: usize, replicates: usize) -> ScenarioConfig {
    ScenarioConfig::new(dist, g, n, replicates, 42).unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn statistics_do_not_depend_on_thread_count() {
    let cfg = cell(DistributionModel::lognormal(2.0, 1.0).unwrap(), Generator::log(), 200, 300);
    let reference = in_pool(1, || run_scenario(&cfg).unwrap());
    for threads in [2, 4, 8] {
        let other = in_pool(threads, || run_scenario(&cfg).unwrap());
        let same = reference
            .statistics
            .iter()
            .zip(&other.statistics)
            .all(|(a, b)| a.to_bits() == b.to_bits());
        assert!(same, "threads={threads}");
        assert_eq!(reference.ks_vs_normal.to_bits(), other.ks_vs_normal.to_bits());
    }
}

#[test]
fn report_shape() {
    let r = run_scenario(&cell(DistributionModel::uniform(1.0, 2.0).unwrap(), Generator::reciprocal(), 50, 123)).unwrap();
    assert_eq!(r.statistics.len(), 123);
    assert_eq!(r.means.len(), 123);
    assert!((0.0..=1.0).contains(&r.ks_vs_normal));
    let bins = histogram(&r.statistics).unwrap();
    assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 123);
}

#[test]
fn configuration_is_validated() {
    let u = DistributionModel::uniform(1.0, 2.0).unwrap();
    for r in [
        ScenarioConfig::new(u, Generator::log(), 1, 10, 0),
        ScenarioConfig::new(u, Generator::log(), 10, 0, 0),
        ScenarioConfig::new(DistributionModel::uniform(-1.0, 1.0).unwrap(), Generator::log(), 10, 10, 0),
    ] {
        assert!(matches!(r, Err(Error::Configuration(_))), "{r:?}");
    }
}

#[test]
fn ks_rejection_rate_under_the_null() {
    const N: usize = 1000;
    const TRIALS: u64 = 1000;
    let threshold = 1.36 / (N as f64).sqrt();
    let rejections = (0..TRIALS)
        .filter(|&t| {
            let mut rng = rng_stream(2024, t);
            let xs: Vec<f64> = (0..N).map(|_| rng.random::<f64>()).collect();
            ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap() > threshold
        })
        .count();
    let rate = rejections as f64 / TRIALS as f64;
    assert!(rate <= 0.07, "rejection rate {rate}");
}

#[test]
fn variance_ratio_close_to_one_for_every_figure_cell() {
    for s in figure1_scenarios() {
        for g in figure1_generators() {
            let r = run_scenario(&cell(s.dist, g.clone(), 1000, 1000)).unwrap();
            let ratio = r.variance_ratio().unwrap();
            assert!((0.85..=1.15).contains(&ratio), "{} {g}: {ratio}", s.label);
        }
    }
}

#[test]
fn ks_improves_from_small_to_large_samples() {
    let mut failures = Vec::new();
    for s in figure1_scenarios() {
        for g in figure1_generators() {
            let small = run_scenario(&cell(s.dist, g.clone(), 10, 1000)).unwrap().ks_vs_normal;
            let large = run_scenario(&cell(s.dist, g.clone(), 1000, 1000)).unwrap().ks_vs_normal;
            if large > small {
                failures.push(format!("{}-{g}: ks(10) = {small:.4}, ks(1000) = {large:.4}", s.label));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

fn edgeworth_and_normal_gaps(dist: DistributionModel, n: usize) -> (f64, f64) {
    let r = run_scenario(&cell(dist, Generator::identity(), n, 100_000)).unwrap();
    let mom = g_moments(&Generator::identity(), &dist, MomentMethod::Auto).unwrap();
    let cmp = compare_edgeworth(&r.statistics, &mom, n, Interval::new(-4.0, 4.0).unwrap(), 801).unwrap();
    assert_eq!(cmp.rows.len(), 801);
    assert!(cmp.rows.iter().all(|row| (0.0..=1.0).contains(&row.empirical)));
    (cmp.edgeworth_sup_gap, cmp.normal_sup_gap)
}

#[test]
fn edgeworth_beats_normal_for_the_exponential_mean() {
    for n in [5usize, 20] {
        let (ew, phi) = edgeworth_and_normal_gaps(DistributionModel::gamma(1.0, 1.0).unwrap(), n);
        assert!(ew < phi, "n={n}: edgeworth {ew} vs normal {phi}");
    }
}

#[test]
fn edgeworth_beats_normal_for_the_gamma_100_mean() {
    let (ew, phi) = edgeworth_and_normal_gaps(DistributionModel::gamma(100.0, 1.0).unwrap(), 20);
    assert!(ew < phi, "edgeworth {ew} vs normal {phi}");
}

#[test]
fn log_normal_mean_statistics_are_right_skewed() {
    let r = run_scenario(&cell(figure2_distribution(), Generator::identity(), 1000, 10_000)).unwrap();
    let skew = sample_skewness(&r.statistics).unwrap();
    assert!(skew > 0.0, "skewness {skew}");
}

#[test]
fn edgeworth_equals_normal_when_corrections_vanish() {
    let dist = figure2_distribution();
    let r = run_scenario(&cell(dist, Generator::log(), 100, 500)).unwrap();
    let mom = r.moments.unwrap();
    let cmp = compare_edgeworth(&r.statistics, &mom, 100, Interval::new(-3.0, 3.0).unwrap(), 61).unwrap();
    assert!(cmp.rows.iter().all(|row| row.edgeworth == row.normal));
    assert_eq!(cmp.edgeworth_sup_gap, cmp.normal_sup_gap);
}

#[test]
fn symmetric_scenario_has_matching_gaps() {
    let dist = DistributionModel::uniform(1.0, 2.0).unwrap();
    let mom = g_moments(&Generator::identity(), &dist, MomentMethod::Auto).unwrap();
    assert!(mom.skew_g.unwrap().abs() < 1e-12);
    let r = run_scenario(&cell(dist, Generator::identity(), 50, 20_000)).unwrap();
    let cmp = compare_edgeworth(&r.statistics, &mom, 50, Interval::new(-4.0, 4.0).unwrap(), 161).unwrap();
    assert!((cmp.edgeworth_sup_gap - cmp.normal_sup_gap).abs() < 0.005);
}
