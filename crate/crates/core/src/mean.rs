//! The regular mean M_g(x) = g⁻¹((1/n) Σ g(xᵢ)), its overflow-safe variants,
//! and an executable check of the four characterizing axioms.

use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::numeric::{compensated_sum, CompensatedSum};

/// A non-empty vector of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("sample must contain at least one value".into()));
        }
        if let Some(v) = values.iter().find(|v| v.is_nan()) {
            return Err(Error::InvalidParameter(format!("sample contains {v}")));
        }
        Ok(Sample(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Sample {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn non_empty(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        Err(Error::Precondition("mean of an empty sample".into()))
    } else {
        Ok(())
    }
}

fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Regular mean g⁻¹((1/n) Σ g(xᵢ)).
///
/// The generator sum is accumulated with compensation, so reordering the
/// sample only moves the result by rounding of the final division and
/// inverse. The result is clamped to `[min x, max x]`, where the exact
/// value always lies.
pub fn mean(g: &Generator, x: &[f64]) -> Result<f64> {
    non_empty(x)?;
    let mut acc = CompensatedSum::new();
    for &v in x {
        acc.add(g.forward(v)?);
    }
    let avg = acc.total() / x.len() as f64;
    if !avg.is_finite() {
        return Err(Error::NumericFailure(format!(
            "generator average overflowed for {g}; use a log-space variant"
        )));
    }
    let (lo, hi) = min_max(x);
    if lo == hi {
        return Ok(lo);
    }
    let m = g.inverse_within(avg, lo, hi)?;
    Ok(m.clamp(lo, hi))
}

/// Power mean {(1/n) Σ xᵢᵖ}^{1/p}, with the geometric mean at p = 0.
///
/// Evaluated in log space, so large |p| does not overflow. Any real p is
/// accepted, including negative ones (p = −1 is the harmonic mean).
pub fn power_mean(p: f64, x: &[f64]) -> Result<f64> {
    non_empty(x)?;
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!("power mean exponent must be finite, got {p}")));
    }
    if let Some(&v) = x.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::Domain {
            value: v,
            domain: "(0, ∞)".into(),
        });
    }
    let (lo, hi) = min_max(x);
    if lo == hi {
        return Ok(lo);
    }
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let log_mean = if p == 0.0 {
        compensated_sum(logs.iter().copied()) / x.len() as f64
    } else {
        let scaled: Vec<f64> = logs.iter().map(|l| p * l).collect();
        (log_mean_exp(&scaled)) / p
    };
    Ok(log_mean.exp().clamp(lo, hi))
}

/// log((1/n) Σ exp(vᵢ)) with the maximum shifted out.
fn log_mean_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s = compensated_sum(v.iter().map(|&a| (a - max).exp()));
    max + (s / v.len() as f64).ln()
}

/// Exponential mean log((1/n) Σ exp(xᵢ)) via log-sum-exp.
///
/// Finite for every finite input, including values near `f64::MAX`.
pub fn exp_mean_stable(x: &[f64]) -> Result<f64> {
    non_empty(x)?;
    if let Some(&v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain {
            value: v,
            domain: "(-∞, ∞)".into(),
        });
    }
    let (lo, hi) = min_max(x);
    if lo == hi {
        return Ok(lo);
    }
    Ok(log_mean_exp(x).clamp(lo, hi))
}

/// Outcome of one axiom over all trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub pass: bool,
    pub worst_violation: f64,
}

impl AxiomOutcome {
    fn new() -> Self {
        AxiomOutcome {
            pass: true,
            worst_violation: 0.0,
        }
    }

    fn record(&mut self, violation: f64, ok: bool) {
        if violation > self.worst_violation || violation.is_nan() {
            self.worst_violation = violation;
        }
        self.pass &= ok;
    }
}

/// Results of [`check_axioms`].
///
/// For A1 the violation is `M(x) − M(x')` clipped at zero, where `x'` raises
/// one coordinate by ε; any non-positive increase fails. For A2–A4 it is the
/// absolute deviation divided by `max(1, |M|)`, compared against `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub generator: String,
    pub n: usize,
    pub n0: usize,
    pub a1_monotone: AxiomOutcome,
    pub a2_symmetric: AxiomOutcome,
    pub a3_idempotent: AxiomOutcome,
    pub a4_replacement: AxiomOutcome,
    pub trials: usize,
    pub tolerance: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub sample_box: crate::generator::Interval,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.a1_monotone.pass && self.a2_symmetric.pass && self.a3_idempotent.pass && self.a4_replacement.pass
    }
}

fn scaled_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

/// Checks the mean axioms on random samples from the generator's default
/// compact box.
///
/// * A1: raising any single coordinate by ε = 1e−4·(box width) strictly
///   increases the mean.
/// * A2: a random permutation leaves the mean unchanged.
/// * A3: the mean of a constant vector is the constant.
/// * A4: replacing the first `n0` coordinates by their own mean leaves the
///   mean unchanged.
pub fn check_axioms(
    g: &Generator,
    n: usize,
    n0: usize,
    trials: usize,
    tol: f64,
    rng_seed: u64,
) -> Result<AxiomReport> {
    if n == 0 || n0 == 0 || n0 > n {
        return Err(Error::InvalidParameter(format!("need 1 <= n0 <= n, got n = {n}, n0 = {n0}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let sample_box = g.domain().default_box();
    let eps = 1e-4 * sample_box.width();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    let mut a1 = AxiomOutcome::new();
    let mut a2 = AxiomOutcome::new();
    let mut a3 = AxiomOutcome::new();
    let mut a4 = AxiomOutcome::new();

    let mut x = vec![0.0; n];
    let mut work = vec![0.0; n];
    for _ in 0..trials {
        for v in x.iter_mut() {
            *v = rng.random_range(sample_box.lo..=sample_box.hi);
        }
        let m = mean(g, &x)?;

        // A1
        for j in 0..n {
            work.copy_from_slice(&x);
            work[j] += eps;
            let bumped = mean(g, &work)?;
            let rise = bumped - m;
            a1.record((-rise).max(0.0), rise > 0.0);
        }

        // A2
        work.copy_from_slice(&x);
        work.shuffle(&mut rng);
        let permuted = mean(g, &work)?;
        let gap = scaled_gap(m, permuted);
        a2.record(gap, gap <= tol);

        // A3
        let c = rng.random_range(sample_box.lo..=sample_box.hi);
        work.fill(c);
        let constant = mean(g, &work)?;
        let gap = scaled_gap(c, constant);
        a3.record(gap, gap <= tol);

        // A4
        let head = mean(g, &x[..n0])?;
        work.copy_from_slice(&x);
        work[..n0].fill(head);
        let replaced = mean(g, &work)?;
        let gap = scaled_gap(m, replaced);
        a4.record(gap, gap <= tol);
    }

    Ok(AxiomReport {
        generator: g.name().to_string(),
        n,
        n0,
        a1_monotone: a1,
        a2_symmetric: a2,
        a3_idempotent: a3,
        a4_replacement: a4,
        trials,
        tolerance: tol,
        epsilon: eps,
        seed: rng_seed,
        sample_box,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn mean_examples() {
        assert_eq!(mean(&Generator::identity(), &[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert!(close(mean(&Generator::log(), &[2.0, 8.0]).unwrap(), 4.0, 1e-15));
        assert!(close(mean(&Generator::reciprocal(), &[2.0, 6.0]).unwrap(), 3.0, 1e-15));
    }

    #[test]
    fn constant_samples_return_the_constant() {
        let gens = [
            Generator::identity(),
            Generator::log(),
            Generator::reciprocal(),
            Generator::power(2.5).unwrap(),
            Generator::exp(),
        ];
        for g in &gens {
            for c in [0.3, 1.0, 7.25] {
                assert_eq!(mean(g, &[c; 5]).unwrap(), c, "{g}");
            }
        }
    }

    #[test]
    fn single_observation_is_its_own_mean() {
        assert_eq!(mean(&Generator::log(), &[3.0]).unwrap(), 3.0);
    }

    #[test]
    fn mean_errors() {
        assert!(matches!(mean(&Generator::log(), &[]), Err(Error::Precondition(_))));
        assert!(matches!(mean(&Generator::log(), &[1.0, -2.0]), Err(Error::Domain { .. })));
        assert!(matches!(mean(&Generator::reciprocal(), &[0.0, 1.0]), Err(Error::Domain { .. })));
        assert!(matches!(mean(&Generator::exp(), &[800.0, 1.0]), Err(Error::NumericFailure(_))));
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn power_mean_examples() {
        let x = [1.5, 2.0, 7.0];
        assert!(close(power_mean(1.0, &x).unwrap(), mean(&Generator::identity(), &x).unwrap(), 1e-15));
        assert!(close(power_mean(2.0, &[3.0, 4.0]).unwrap(), 12.5f64.sqrt(), 1e-15));
        assert!(close(power_mean(0.0, &[2.0, 8.0]).unwrap(), 4.0, 1e-15));
        assert!(close(power_mean(-1.0, &[2.0, 6.0]).unwrap(), 3.0, 1e-15));
        // no overflow for huge exponents
        let big = power_mean(400.0, &[10.0, 20.0]).unwrap();
        assert!(close(big, 20.0 * 0.5f64.powf(1.0 / 400.0), 1e-14));
        assert!(matches!(power_mean(2.0, &[1.0, 0.0]), Err(Error::Domain { .. })));
    }

    #[test]
    fn exp_mean_examples() {
        assert_eq!(exp_mean_stable(&[0.7, 0.7]).unwrap(), 0.7);
        assert_eq!(exp_mean_stable(&[1000.0, 1000.0]).unwrap(), 1000.0);
        assert!(close(exp_mean_stable(&[0.0, 3f64.ln()]).unwrap(), 2f64.ln(), 1e-15));
        let huge = exp_mean_stable(&[f64::MAX, f64::MAX / 2.0]).unwrap();
        assert!(huge.is_finite());
        assert!(exp_mean_stable(&[]).is_err());
    }

    #[test]
    fn axiom_examples() {
        let r = check_axioms(&Generator::log(), 5, 3, 1000, 1e-9, 7).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let r = check_axioms(&Generator::identity(), 2, 2, 200, 1e-9, 1).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let r = check_axioms(&Generator::exp(), 10, 1, 200, 1e-9, 3).unwrap();
        assert!(r.all_pass(), "{r:?}");
        // with n0 = 1 the replacement is exactly the identity operation
        assert_eq!(r.a4_replacement.worst_violation, 0.0);
    }

    #[test]
    fn axiom_argument_validation() {
        let g = Generator::log();
        assert!(check_axioms(&g, 3, 0, 10, 1e-9, 0).is_err());
        assert!(check_axioms(&g, 3, 4, 10, 1e-9, 0).is_err());
        assert!(check_axioms(&g, 3, 2, 0, 1e-9, 0).is_err());
    }

    #[test]
    fn a_non_mean_fails_the_axioms() {
        // g(x) = x³ − 3x is not monotone on [-3, 3]; the "mean" built from a
        // custom inverse that ignores the branch violates internality and A1.
        use crate::generator::{Direction, Domain};
        use std::sync::Arc;
        let bad = Generator::custom(
            "not-monotone",
            Domain::REAL,
            Direction::Increasing,
            Arc::new(|x: f64| x * x * x - 3.0 * x),
            Some(Arc::new(|x: f64| 3.0 * x * x - 3.0)),
            None,
        );
        let r = check_axioms(&bad, 3, 2, 200, 1e-9, 11);
        assert!(r.map(|r| !r.all_pass()).unwrap_or(true));
    }
}
