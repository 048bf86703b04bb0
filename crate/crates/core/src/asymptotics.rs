//! Population side of the universal central limit theorem.
//!
//! * Kolmogorov expected value E_g(X) = g⁻¹(E{g(X)}).
//! * Asymptotic variance var{g(X)} / g′(E_g(X))² of √n(M_g − E_g).
//! * Moments of g(X) (mean, variance, skewness γ_g, excess kurtosis κ_g) by
//!   closed form, adaptive quadrature, or Monte Carlo.
//! * The Edgeworth expansion of the standardized statistic up to O(1/n).
//!
//! Quadrature integrates over the quantile scale, E{h(X)} = ∫₀¹ h(Q(u)) du,
//! splitting at u = 1/2 and evaluating the upper half through the
//! upper-tail quantile so that both tails keep full precision. Geometric
//! breakpoints down to 10⁻³⁰⁰ in each tail let the adaptive pass find mass
//! far out in heavy tails.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionModel, Moment};
use crate::error::{Error, Result};
use crate::generator::{Generator, Kind};
use crate::numeric::{normal_cdf, normal_pdf, polygamma, CompensatedSum};
use crate::quadrature::{integrate_with_breaks, QuadratureOptions};

/// How moments of g(X) are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    /// Closed form when the generator/distribution pair has one, else
    /// quadrature.
    Auto,
    ClosedForm,
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

/// Which method actually produced a [`GMoments`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodUsed {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// Moments of g(X). Skewness and excess kurtosis are `None` when g(X) is
/// degenerate (zero variance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GMoments {
    pub mean_g: f64,
    pub var_g: f64,
    pub skew_g: Option<f64>,
    pub exkurt_g: Option<f64>,
    pub method: MethodUsed,
}

impl GMoments {
    /// Shape coefficients for the Edgeworth expansion.
    pub fn edgeworth(&self) -> Result<EdgeworthCoefficients> {
        match (self.skew_g, self.exkurt_g) {
            (Some(skew), Some(exkurt)) => Ok(EdgeworthCoefficients { skew, exkurt }),
            _ => Err(Error::Degenerate(
                "g(X) has zero variance; skewness and kurtosis are undefined".into(),
            )),
        }
    }
}

/// Centering and scaling constants of the universal CLT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSpec {
    /// E_g(X)
    pub eg: f64,
    /// g′(E_g(X))
    pub gprime_at_eg: f64,
    /// var{g(X)} / g′(E_g(X))²
    pub asym_var: f64,
    pub mean_g: f64,
    pub var_g: f64,
}

impl AsymptoticSpec {
    pub fn standardize(&self, m_value: f64, n: usize) -> Result<f64> {
        standardize(self, m_value, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Central {
    mean: f64,
    // central moments of order 2, 3, 4 (index 0, 1, 2); unused orders are 0
    c: [f64; 3],
}

impl Central {
    fn constant(v: f64) -> Self {
        Central { mean: v, c: [0.0; 3] }
    }

    fn affine(self, scale: f64, shift: f64) -> Self {
        Central {
            mean: scale * self.mean + shift,
            c: [
                scale.powi(2) * self.c[0],
                scale.powi(3) * self.c[1],
                scale.powi(4) * self.c[2],
            ],
        }
    }

    fn from_raw(raw: &[f64]) -> Self {
        let m1 = raw[0];
        let mut c = [0.0; 3];
        if raw.len() >= 2 {
            c[0] = (raw[1] - m1 * m1).max(0.0);
        }
        if raw.len() >= 3 {
            c[1] = raw[2] - 3.0 * m1 * raw[1] + 2.0 * m1.powi(3);
        }
        if raw.len() >= 4 {
            c[2] = raw[3] - 4.0 * m1 * raw[2] + 6.0 * m1 * m1 * raw[1] - 3.0 * m1.powi(4);
        }
        Central { mean: m1, c }
    }

    fn into_moments(self, method: MethodUsed) -> GMoments {
        let var = self.c[0];
        let (skew, exkurt) = if var > 0.0 {
            (
                Some(self.c[1] / var.powf(1.5)),
                Some((self.c[2] - 3.0 * (var * var)) / (var * var)),
            )
        } else {
            (None, None)
        };
        GMoments {
            mean_g: self.mean,
            var_g: var,
            skew_g: skew,
            exkurt_g: exkurt,
            method,
        }
    }
}

fn divergent(order: u32, g: &Generator, dist: &DistributionModel) -> Error {
    Error::Divergent {
        order,
        detail: format!("E[{g}(X)^{order}] is infinite under {dist}"),
    }
}

fn check_compatible(g: &Generator, dist: &DistributionModel) -> Result<()> {
    if g.domain().covers(&dist.support()) {
        Ok(())
    } else {
        Err(Error::Configuration(format!(
            "support {} of {dist} is not inside the input range {} of generator {g}",
            dist.support(),
            g.domain()
        )))
    }
}

// ---------------------------------------------------------------------------
// closed forms

/// Raw moments E[(ln X)^k] for Uniform(a, b), a > 0, from the antiderivative
/// x Σ_j (−1)^{k−j} k!/j! (ln x)^j.
fn uniform_log_raw(lo: f64, hi: f64, k: u32) -> f64 {
    let anti = |x: f64| {
        let l = x.ln();
        let mut s = 0.0;
        let mut coef = 1.0; // k!/j! for j = k down to 0
        for j in (0..=k).rev() {
            let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            s += sign * coef * l.powi(j as i32);
            coef *= f64::from(j.max(1));
        }
        x * s
    };
    (anti(hi) - anti(lo)) / (hi - lo)
}

fn closed_form(g: &Generator, dist: &DistributionModel, order: u32) -> Option<Result<Central>> {
    if let DistributionModel::PointMass { at } = *dist {
        return Some(g.forward(at).map(Central::constant));
    }
    let power_type = |s: f64| -> Result<Central> {
        let raw = (1..=order)
            .map(|k| match dist.real_moment(f64::from(k) * s) {
                Moment::Finite(v) => Ok(v),
                Moment::Divergent => Err(divergent(k, g, dist)),
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Central::from_raw(&raw))
    };
    Some(match &g.kind {
        Kind::Identity => power_type(1.0),
        Kind::Reciprocal => power_type(-1.0),
        Kind::Power(p) => power_type(*p),
        Kind::Log => Ok(log_closed_form(dist)),
        Kind::Exp => {
            let raw = (1..=order)
                .map(|k| {
                    let kf = f64::from(k);
                    match *dist {
                        DistributionModel::Uniform { lo, hi } => {
                            Ok(((kf * hi).exp() - (kf * lo).exp()) / (kf * (hi - lo)))
                        }
                        DistributionModel::Gamma { shape, rate } if kf < rate => {
                            Ok((rate / (rate - kf)).powf(shape))
                        }
                        _ => Err(divergent(k, g, dist)),
                    }
                })
                .collect::<Result<Vec<f64>>>();
            raw.map(|r| Central::from_raw(&r))
        }
        Kind::Affine { base, scale, shift } => {
            return closed_form(base, dist, order).map(|r| r.map(|c| c.affine(*scale, *shift)));
        }
        Kind::Blend { .. } | Kind::Custom { .. } => return None,
    })
}

fn log_closed_form(dist: &DistributionModel) -> Central {
    match *dist {
        DistributionModel::LogNormal { mu, sigma2 } => Central {
            mean: mu,
            c: [sigma2, 0.0, 3.0 * (sigma2 * sigma2)],
        },
        DistributionModel::Gamma { shape, rate } => {
            // cumulants of ln X are polygamma values
            let k2 = polygamma(1, shape);
            Central {
                mean: polygamma(0, shape) - rate.ln(),
                c: [k2, polygamma(2, shape), polygamma(3, shape) + 3.0 * k2 * k2],
            }
        }
        DistributionModel::Pareto { alpha, scale } => {
            // ln X = ln x_m + Exp(α)
            let a2 = alpha * alpha;
            Central {
                mean: scale.ln() + 1.0 / alpha,
                c: [1.0 / a2, 2.0 / (a2 * alpha), 9.0 / (a2 * a2)],
            }
        }
        DistributionModel::Uniform { lo, hi } => {
            let raw: Vec<f64> = (1..=4).map(|k| uniform_log_raw(lo, hi, k)).collect();
            Central::from_raw(&raw)
        }
        DistributionModel::PointMass { at } => Central::constant(at.ln()),
    }
}

// ---------------------------------------------------------------------------
// quadrature

fn tail_breaks() -> Vec<f64> {
    let mut b = vec![0.0];
    let mut exps: Vec<i32> = (3..=30).rev().map(|k| 10 * k).collect();
    exps.extend((1..=20).rev());
    b.extend(exps.into_iter().map(|e| 10f64.powi(-e)));
    b.push(0.1);
    b.push(0.5);
    b
}

/// ∫₀¹ h(Q(u)) du on the quantile scale.
fn quantile_integral<H: Fn(f64) -> f64>(
    dist: &DistributionModel,
    h: H,
    opts: QuadratureOptions,
) -> (f64, bool) {
    let breaks = tail_breaks();
    let lower = |u: f64| match dist.lower_quantile_unchecked(u) {
        Ok(x) => h(x),
        Err(_) => f64::NAN,
    };
    let upper = |q: f64| match dist.upper_quantile_unchecked(q) {
        Ok(x) => h(x),
        Err(_) => f64::NAN,
    };
    let a = integrate_with_breaks(lower, &breaks, opts);
    let b = integrate_with_breaks(upper, &breaks, opts);
    (a.value + b.value, a.converged && b.converged)
}

/// Heavy-tail check: estimate the local power-law exponent β of
/// |h(Q(u))| ~ q^{−β} in each tail; β ≥ 1 means the integral diverges.
fn tail_is_fat<H: Fn(f64) -> f64>(dist: &DistributionModel, h: H) -> bool {
    let (q1, q2) = (1e-12_f64, 1e-14_f64);
    let probe = |x: Result<f64>| x.map(|v| h(v).abs()).unwrap_or(f64::NAN);
    let pairs = [
        (probe(dist.lower_quantile_unchecked(q1)), probe(dist.lower_quantile_unchecked(q2))),
        (probe(dist.upper_quantile_unchecked(q1)), probe(dist.upper_quantile_unchecked(q2))),
    ];
    pairs.iter().any(|&(f1, f2)| {
        if !(f1.is_finite() && f2.is_finite()) {
            return true;
        }
        if f1 == 0.0 || f2 == 0.0 {
            return false;
        }
        let beta = (f2.ln() - f1.ln()) / (q1.ln() - q2.ln());
        beta >= 0.98
    })
}

/// Interquartile range of g(X), or 1 if it is zero or not finite.
fn spread_of(g: &Generator, dist: &DistributionModel) -> f64 {
    let at = |u: f64| dist.lower_quantile_unchecked(u).map(|x| g.eval(x));
    match (at(0.25), dist.upper_quantile_unchecked(0.25).map(|x| g.eval(x))) {
        (Ok(a), Ok(b)) if (b - a).is_finite() && b != a => (b - a).abs(),
        _ => 1.0,
    }
}

fn quadrature_moments(g: &Generator, dist: &DistributionModel, order: u32) -> Result<Central> {
    if let DistributionModel::PointMass { at } = *dist {
        return g.forward(at).map(Central::constant);
    }
    let gx = |x: f64| g.eval(x);
    // absolute tolerances follow the spread of g(X) so that tiny variances
    // are still resolved to full relative precision
    let spread = spread_of(g, dist);
    let run = |k: u32, center: f64| -> Result<f64> {
        let h = |x: f64| (gx(x) - center).powi(k as i32);
        let opts = QuadratureOptions {
            abs_tol: 1e-14 * spread.powi(k as i32),
            ..QuadratureOptions::default()
        };
        let (value, converged) = quantile_integral(dist, h, opts);
        if converged && value.is_finite() {
            return Ok(value);
        }
        if tail_is_fat(dist, h) {
            Err(divergent(k, g, dist))
        } else {
            Err(Error::NumericFailure(format!(
                "quadrature for order-{k} moment of {g}(X) under {dist} did not converge"
            )))
        }
    };
    let mean = run(1, 0.0)?;
    let mut c = [0.0; 3];
    for k in 2..=order {
        c[(k - 2) as usize] = run(k, mean)?;
    }
    c[0] = c[0].max(0.0);
    Ok(Central { mean, c })
}

fn monte_carlo_moments(
    g: &Generator,
    dist: &DistributionModel,
    order: u32,
    samples: usize,
    seed: u64,
) -> Result<Central> {
    if samples < 2 {
        return Err(Error::InvalidParameter("Monte Carlo moments need at least 2 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let v = g.forward(dist.draw(&mut rng))?;
        values.push(v);
    }
    let n = samples as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().total() / n;
    let mut c = [0.0; 3];
    for k in 2..=order {
        c[(k - 2) as usize] = values
            .iter()
            .map(|v| (v - mean).powi(k as i32))
            .collect::<CompensatedSum>()
            .total()
            / n;
    }
    if !(mean.is_finite() && c.iter().all(|v| v.is_finite())) {
        return Err(Error::NumericFailure(format!(
            "Monte Carlo moments of {g}(X) under {dist} overflowed"
        )));
    }
    Ok(Central { mean, c })
}

fn central_moments(
    g: &Generator,
    dist: &DistributionModel,
    order: u32,
    method: MomentMethod,
) -> Result<(Central, MethodUsed)> {
    check_compatible(g, dist)?;
    match method {
        MomentMethod::Auto => match closed_form(g, dist, order) {
            Some(r) => r.map(|c| (c, MethodUsed::ClosedForm)),
            None => quadrature_moments(g, dist, order).map(|c| (c, MethodUsed::Quadrature)),
        },
        MomentMethod::ClosedForm => match closed_form(g, dist, order) {
            Some(r) => r.map(|c| (c, MethodUsed::ClosedForm)),
            None => Err(Error::InvalidParameter(format!(
                "no closed form for generator {g}; use quadrature"
            ))),
        },
        MomentMethod::Quadrature => quadrature_moments(g, dist, order).map(|c| (c, MethodUsed::Quadrature)),
        MomentMethod::MonteCarlo { samples, seed } => {
            monte_carlo_moments(g, dist, order, samples, seed).map(|c| (c, MethodUsed::MonteCarlo))
        }
    }
}

/// Mean, variance, skewness and excess kurtosis of g(X).
pub fn g_moments(g: &Generator, dist: &DistributionModel, method: MomentMethod) -> Result<GMoments> {
    let (c, used) = central_moments(g, dist, 4, method)?;
    Ok(c.into_moments(used))
}

/// Mean and variance of g(X) only; needs just the second moment.
pub fn g_mean_var(g: &Generator, dist: &DistributionModel, method: MomentMethod) -> Result<(f64, f64)> {
    let (c, _) = central_moments(g, dist, 2, method)?;
    Ok((c.mean, c.c[0]))
}

/// Kolmogorov expected value g⁻¹(E{g(X)}).
pub fn kolmogorov_expectation(g: &Generator, dist: &DistributionModel, method: MomentMethod) -> Result<f64> {
    let (c, _) = central_moments(g, dist, 1, method)?;
    if let DistributionModel::PointMass { at } = *dist {
        return Ok(at);
    }
    g.inverse(c.mean)
}

/// E_g(X), g′(E_g(X)) and the asymptotic variance var{g(X)}/g′(E_g(X))².
pub fn asymptotic_variance(
    g: &Generator,
    dist: &DistributionModel,
    method: MomentMethod,
) -> Result<AsymptoticSpec> {
    let (c, _) = central_moments(g, dist, 2, method)?;
    let eg = match *dist {
        DistributionModel::PointMass { at } => at,
        _ => g.inverse(c.mean)?,
    };
    let gprime = g.derivative(eg)?;
    if gprime == 0.0 || !gprime.is_finite() {
        return Err(Error::SingularDerivative(eg));
    }
    Ok(AsymptoticSpec {
        eg,
        gprime_at_eg: gprime,
        asym_var: c.c[0] / (gprime * gprime),
        mean_g: c.mean,
        var_g: c.c[0],
    })
}

/// √n·(m − E_g)/√(asymptotic variance).
pub fn standardize(spec: &AsymptoticSpec, m_value: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("sample size n must be at least 1".into()));
    }
    if !(spec.asym_var > 0.0) {
        return Err(Error::Degenerate(format!(
            "asymptotic variance is {}; cannot standardize",
            spec.asym_var
        )));
    }
    Ok((n as f64).sqrt() * (m_value - spec.eg) / spec.asym_var.sqrt())
}

// ---------------------------------------------------------------------------
// Edgeworth expansion

/// Hermite-type polynomials of the expansion:
/// p₁(x) = x² − 1, p₂(x) = x³ − 3x, p₃(x) = x⁵ − 10x³ + 15x.
pub fn hermite(k: u32, x: f64) -> Result<f64> {
    let x2 = x * x;
    match k {
        1 => Ok(x2 - 1.0),
        2 => Ok(x * (x2 - 3.0)),
        3 => Ok(x * (x2 * (x2 - 10.0) + 15.0)),
        _ => Err(Error::InvalidParameter(format!("hermite order must be 1, 2 or 3, got {k}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeworthCoefficients {
    /// skewness γ of g(X)
    pub skew: f64,
    /// excess kurtosis κ of g(X)
    pub exkurt: f64,
}

/// Coefficient of the third (x⁵ − 10x³ + 15x) term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeworthVariant {
    /// γ², the classical expansion.
    #[default]
    SkewSquared,
    /// κ², as typeset in some sources; kept for comparison only.
    KurtosisSquared,
}

/// Components of the expansion at one point. `corrections[i]` is the
/// amount subtracted from Φ(x) by term i, so
/// `value = normal_cdf − Σ corrections`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeworthTerms {
    pub x: f64,
    pub normal_cdf: f64,
    pub corrections: [f64; 3],
    pub value: f64,
}

pub fn edgeworth_terms(
    x: f64,
    n: usize,
    coef: &EdgeworthCoefficients,
    variant: EdgeworthVariant,
) -> EdgeworthTerms {
    let nf = n as f64;
    let density = normal_pdf(x);
    let x2 = x * x;
    let p1 = x2 - 1.0;
    let p2 = x * (x2 - 3.0);
    let p3 = x * (x2 * (x2 - 10.0) + 15.0);
    let third = match variant {
        EdgeworthVariant::SkewSquared => coef.skew * coef.skew,
        EdgeworthVariant::KurtosisSquared => coef.exkurt * coef.exkurt,
    };
    let corrections = [
        density * coef.skew * p1 / (6.0 * nf.sqrt()),
        density * coef.exkurt * p2 / (24.0 * nf),
        density * third * p3 / (72.0 * nf),
    ];
    let phi = normal_cdf(x);
    EdgeworthTerms {
        x,
        normal_cdf: phi,
        corrections,
        value: phi - (corrections[0] + corrections[1] + corrections[2]),
    }
}

/// Edgeworth approximation of P(standardized statistic ≤ x), unclamped.
pub fn edgeworth_cdf(x: f64, n: usize, coef: &EdgeworthCoefficients) -> f64 {
    edgeworth_terms(x, n, coef, EdgeworthVariant::SkewSquared).value
}

/// [`edgeworth_cdf`] clamped to [0, 1].
pub fn edgeworth_cdf_clamped(x: f64, n: usize, coef: &EdgeworthCoefficients) -> f64 {
    edgeworth_cdf(x, n, coef).clamp(0.0, 1.0)
}
