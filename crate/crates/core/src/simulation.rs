//! Monte Carlo harness for the universal CLT: replicate sampling,
//! standardized statistics, empirical CDFs, KS distances and Edgeworth
//! comparisons.
//!
//! Replicate `r` draws from its own ChaCha stream `(seed, r)`, so results
//! do not depend on how replicates are scheduled across threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{
    asymptotic_variance, edgeworth_cdf, g_moments, AsymptoticSpec, EdgeworthCoefficients, GMoments,
    MomentMethod,
};
use crate::distributions::{rng_stream, DistributionModel};
use crate::error::{Error, Result};
use crate::generator::{Generator, Interval};
use crate::mean::mean;
use crate::numeric::{mean_and_variance, normal_cdf, normal_pdf};

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub dist: DistributionModel,
    pub generator: Generator,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(
        dist: DistributionModel,
        generator: Generator,
        n: usize,
        replicates: usize,
        seed: u64,
    ) -> Result<Self> {
        let cfg = ScenarioConfig { dist, generator, n, replicates, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Configuration(format!("sample size n must be at least 2, got {}", self.n)));
        }
        if self.replicates < 1 {
            return Err(Error::Configuration("replicates must be at least 1".into()));
        }
        if !self.generator.domain().covers(&self.dist.support()) {
            return Err(Error::Configuration(format!(
                "support {} of {} is not inside the input range {} of generator {}",
                self.dist.support(),
                self.dist,
                self.generator.domain(),
                self.generator
            )));
        }
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            dist: self.dist.spec(),
            generator: self.generator.name().to_string(),
            n: self.n,
            replicates: self.replicates,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub dist: String,
    pub generator: String,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub config: ConfigEcho,
    /// M_g of each replicate sample
    pub means: Vec<f64>,
    /// √n·(M_g − E_g)
    pub scaled_errors: Vec<f64>,
    /// √n·(M_g − E_g)/√(asymptotic variance)
    pub statistics: Vec<f64>,
    pub ks_vs_normal: f64,
    /// Sample variance of the scaled errors; `None` with a single replicate.
    pub empirical_var: Option<f64>,
    pub asymptotic: AsymptoticSpec,
    /// `None` when the third or fourth moment of g(X) diverges or g(X) is
    /// degenerate.
    pub moments: Option<GMoments>,
    /// KS-type distance of the statistics to the Edgeworth CDF.
    pub edgeworth_sup_gap: Option<f64>,
    pub runtime_ms: f64,
}

impl SimulationReport {
    pub fn variance_ratio(&self) -> Option<f64> {
        self.empirical_var.map(|v| v / self.asymptotic.asym_var)
    }

    pub fn edgeworth_coefficients(&self) -> Option<EdgeworthCoefficients> {
        self.moments.and_then(|m| m.edgeworth().ok())
    }
}

/// Runs every replicate of a scenario and aggregates the standardized
/// statistics.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimulationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let asymptotic = asymptotic_variance(&cfg.generator, &cfg.dist, MomentMethod::Auto)?;
    if !(asymptotic.asym_var > 0.0) {
        return Err(Error::Degenerate(format!(
            "{} has zero asymptotic variance under {}",
            cfg.generator, cfg.dist
        )));
    }
    let moments = match g_moments(&cfg.generator, &cfg.dist, MomentMethod::Auto) {
        Ok(m) => Some(m),
        Err(Error::Divergent { .. }) => None,
        Err(e) => return Err(e),
    };

    let means = (0..cfg.replicates)
        .into_par_iter()
        .map_init(
            || vec![0.0; cfg.n],
            |buf, r| {
                let mut rng = rng_stream(cfg.seed, r as u64);
                cfg.dist.sample_into(buf, &mut rng);
                mean(&cfg.generator, buf)
            },
        )
        .collect::<Result<Vec<f64>>>()?;

    let root_n = (cfg.n as f64).sqrt();
    let scale = asymptotic.asym_var.sqrt();
    let scaled_errors: Vec<f64> = means.iter().map(|m| root_n * (m - asymptotic.eg)).collect();
    let statistics: Vec<f64> = scaled_errors.iter().map(|e| e / scale).collect();

    let ks_vs_normal = ks_statistic(&statistics, normal_cdf)?;
    let empirical_var = (cfg.replicates >= 2).then(|| mean_and_variance(&scaled_errors, 1).1);
    let edgeworth_sup_gap = match moments.and_then(|m| m.edgeworth().ok()) {
        Some(coef) => Some(ks_statistic(&statistics, |x| edgeworth_cdf(x, cfg.n, &coef))?),
        None => None,
    };

    Ok(SimulationReport {
        config: cfg.echo(),
        means,
        scaled_errors,
        statistics,
        ks_vs_normal,
        empirical_var,
        asymptotic,
        moments,
        edgeworth_sup_gap,
        runtime_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn non_empty(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        Err(Error::Precondition("need at least one value".into()))
    } else {
        Ok(())
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Kolmogorov–Smirnov distance sup |F_N − F| between the empirical
/// distribution of `values` and `reference_cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], reference_cdf: F) -> Result<f64> {
    non_empty(values)?;
    let v = sorted(values);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = reference_cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above.abs()).max(below.abs());
    }
    Ok(d)
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        non_empty(values)?;
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("empirical CDF of NaN values".into()));
        }
        Ok(Ecdf { sorted: sorted(values) })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of values ≤ x.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Sorted `(value, i/N)` pairs, i = 1..N.
    pub fn table(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, (i + 1) as f64 / n))
            .collect()
    }
}

pub fn empirical_cdf(values: &[f64]) -> Result<Ecdf> {
    Ecdf::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub x: f64,
    pub empirical: f64,
    pub normal: f64,
    pub edgeworth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeworthComparison {
    pub rows: Vec<ComparisonRow>,
    pub normal_sup_gap: f64,
    pub edgeworth_sup_gap: f64,
}

/// Empirical CDF of the standardized statistics against Φ and the
/// Edgeworth CDF on `steps` equally spaced points of `grid`.
pub fn compare_edgeworth(
    statistics: &[f64],
    mom: &GMoments,
    n: usize,
    grid: Interval,
    steps: usize,
) -> Result<EdgeworthComparison> {
    let ecdf = Ecdf::new(statistics)?;
    let coef = mom.edgeworth()?;
    if steps < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let rows: Vec<ComparisonRow> = grid
        .grid(steps)
        .into_iter()
        .map(|x| ComparisonRow {
            x,
            empirical: ecdf.eval(x),
            normal: normal_cdf(x),
            edgeworth: edgeworth_cdf(x, n, &coef),
        })
        .collect();
    let gap = |f: fn(&ComparisonRow) -> f64| {
        rows.iter().map(|r| (r.empirical - f(r)).abs()).fold(0.0, f64::max)
    };
    Ok(EdgeworthComparison {
        normal_sup_gap: gap(|r| r.normal),
        edgeworth_sup_gap: gap(|r| r.edgeworth),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: usize,
    pub normal_density_at_mid: f64,
}

pub const HISTOGRAM_BIN_WIDTH: f64 = 0.25;

/// Histogram of standardized statistics on bins of width 0.25 spanning at
/// least [−4, 4], with the N(0,1) density at each bin midpoint.
pub fn histogram(statistics: &[f64]) -> Result<Vec<HistogramBin>> {
    non_empty(statistics)?;
    if statistics.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure("histogram of non-finite statistics".into()));
    }
    let lo = statistics.iter().copied().fold(-4.0, f64::min).floor();
    let hi = statistics.iter().copied().fold(4.0, f64::max).ceil();
    let bins = ((hi - lo) / HISTOGRAM_BIN_WIDTH).round() as usize;
    let mut counts = vec![0usize; bins];
    for &v in statistics {
        let idx = (((v - lo) / HISTOGRAM_BIN_WIDTH).floor() as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let bin_lo = lo + i as f64 * HISTOGRAM_BIN_WIDTH;
            let bin_hi = bin_lo + HISTOGRAM_BIN_WIDTH;
            HistogramBin {
                bin_lo,
                bin_hi,
                count,
                normal_density_at_mid: normal_pdf(0.5 * (bin_lo + bin_hi)),
            }
        })
        .collect())
}

/// Moment-based sample skewness m₃/m₂^{3/2}.
pub fn sample_skewness(values: &[f64]) -> Result<f64> {
    non_empty(values)?;
    let (mean, m2) = mean_and_variance(values, 0);
    if m2 == 0.0 {
        return Err(Error::Degenerate("sample skewness of constant values".into()));
    }
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / values.len() as f64;
    Ok(m3 / m2.powf(1.5))
}
