//! Scenario distributions: LogNormal, Gamma, Uniform and Pareto, plus a
//! point mass for degenerate checks.
//!
//! Every model offers seeded sampling, density, distribution function,
//! lower- and upper-tail quantiles, and closed-form real moments E(Xˢ).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma as GammaSampler, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{Error, Result};
use crate::generator::Domain;
use crate::mean::Sample;
use crate::numeric::{
    gamma_ratio, ln_gamma, normal_cdf, normal_quantile, normal_upper_quantile, solve_bracketed,
};

/// Per-stream random generator. Each replicate of a simulation draws from
/// its own stream selected by `(master seed, stream index)`, so results do
/// not depend on how work is scheduled across threads.
pub type StreamRng = ChaCha8Rng;

pub fn rng_stream(master_seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// A raw moment that is either finite or divergent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Moment::Divergent)
    }
}

/// Distribution of X. Gamma uses the shape–rate convention; Pareto has
/// support `[scale, ∞)` and defaults to scale 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DistributionModel {
    LogNormal { mu: f64, sigma2: f64 },
    Gamma { shape: f64, rate: f64 },
    Uniform { lo: f64, hi: f64 },
    Pareto { alpha: f64, scale: f64 },
    PointMass { at: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl DistributionModel {
    pub fn lognormal(mu: f64, sigma2: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be finite, got {mu}")));
        }
        positive("sigma^2", sigma2)?;
        Ok(DistributionModel::LogNormal { mu, sigma2 })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        positive("gamma shape", shape)?;
        positive("gamma rate", rate)?;
        Ok(DistributionModel::Gamma { shape, rate })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("uniform needs finite a < b, got ({lo}, {hi})")));
        }
        Ok(DistributionModel::Uniform { lo, hi })
    }

    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        positive("pareto alpha", alpha)?;
        positive("pareto scale", scale)?;
        Ok(DistributionModel::Pareto { alpha, scale })
    }

    pub fn point_mass(at: f64) -> Result<Self> {
        if !at.is_finite() {
            return Err(Error::InvalidParameter(format!("point mass location must be finite, got {at}")));
        }
        Ok(DistributionModel::PointMass { at })
    }

    /// Support as a domain. Continuous supports are reported open since
    /// endpoints carry no probability.
    pub fn support(&self) -> Domain {
        match *self {
            DistributionModel::LogNormal { .. } | DistributionModel::Gamma { .. } => Domain::POSITIVE,
            DistributionModel::Uniform { lo, hi } => Domain::open(lo, hi),
            DistributionModel::Pareto { scale, .. } => Domain::open(scale, f64::INFINITY),
            DistributionModel::PointMass { at } => Domain {
                lo: at,
                hi: at,
                lo_closed: true,
                hi_closed: true,
            },
        }
    }

    /// Canonical spec string, e.g. `lognormal:2:1`.
    pub fn spec(&self) -> String {
        match *self {
            DistributionModel::LogNormal { mu, sigma2 } => format!("lognormal:{mu}:{sigma2}"),
            DistributionModel::Gamma { shape, rate } => format!("gamma:{shape}:{rate}"),
            DistributionModel::Uniform { lo, hi } => format!("uniform:{lo}:{hi}"),
            DistributionModel::Pareto { alpha, scale } => format!("pareto:{alpha}:{scale}"),
            DistributionModel::PointMass { at } => format!("point:{at}"),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, DistributionModel::PointMass { .. })
    }

    /// Draws one observation.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionModel::LogNormal { mu, sigma2 } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu + sigma2.sqrt() * z).exp()
            }
            DistributionModel::Gamma { shape, rate } => {
                // Marsaglia–Tsang squeeze/rejection, parameterized by scale.
                GammaSampler::new(shape, 1.0 / rate)
                    .expect("validated gamma parameters")
                    .sample(rng)
            }
            DistributionModel::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            DistributionModel::Pareto { alpha, scale } => {
                // 1 − U ∈ (0, 1] keeps the draw finite
                let u = 1.0 - rng.random::<f64>();
                scale * u.powf(-1.0 / alpha)
            }
            DistributionModel::PointMass { at } => at,
        }
    }

    /// `n` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        if n == 0 {
            return Err(Error::Precondition("sample size must be at least 1".into()));
        }
        Sample::new((0..n).map(|_| self.draw(rng)).collect())
    }

    /// Fills `out` with draws; avoids allocation in simulation loops.
    pub fn sample_into<R: Rng + ?Sized>(&self, out: &mut [f64], rng: &mut R) {
        for v in out.iter_mut() {
            *v = self.draw(rng);
        }
    }

    /// Density; zero outside the support. Not defined for a point mass.
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            DistributionModel::LogNormal { mu, sigma2 } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let z = (x.ln() - mu) / sigma2.sqrt();
                (-0.5 * z * z).exp() / (x * (crate::numeric::TWO_PI * sigma2).sqrt())
            }
            DistributionModel::Gamma { shape, rate } => {
                if x <= 0.0 {
                    return if x == 0.0 && shape == 1.0 { rate } else { 0.0 };
                }
                (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)).exp()
            }
            DistributionModel::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            DistributionModel::Pareto { alpha, scale } => {
                if x < scale {
                    0.0
                } else {
                    alpha * scale.powf(alpha) / x.powf(alpha + 1.0)
                }
            }
            DistributionModel::PointMass { at } => {
                if x == at {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    /// Distribution function F(x) = P(X ≤ x).
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionModel::LogNormal { mu, sigma2 } => {
                if x <= 0.0 {
                    0.0
                } else {
                    normal_cdf((x.ln() - mu) / sigma2.sqrt())
                }
            }
            DistributionModel::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma_lr(shape, rate * x)
                }
            }
            DistributionModel::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            DistributionModel::Pareto { alpha, scale } => {
                if x <= scale {
                    0.0
                } else {
                    -(alpha * (scale / x).ln()).exp_m1()
                }
            }
            DistributionModel::PointMass { at } => {
                if x >= at {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Survival function 1 − F(x), accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            DistributionModel::LogNormal { mu, sigma2 } => {
                if x <= 0.0 {
                    1.0
                } else {
                    normal_cdf(-(x.ln() - mu) / sigma2.sqrt())
                }
            }
            DistributionModel::Gamma { shape, rate } => {
                if x <= 0.0 {
                    1.0
                } else if x.is_infinite() {
                    0.0
                } else {
                    gamma_ur(shape, rate * x)
                }
            }
            DistributionModel::Pareto { alpha, scale } => {
                if x <= scale {
                    1.0
                } else {
                    (scale / x).powf(alpha)
                }
            }
            _ => 1.0 - self.cdf(x),
        }
    }

    /// Quantile F⁻¹(u) for u ∈ (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain {
                value: u,
                domain: "(0, 1)".into(),
            });
        }
        if u > 0.5 {
            return self.upper_quantile_unchecked(1.0 - u);
        }
        self.lower_quantile_unchecked(u)
    }

    /// Upper-tail quantile: the x with 1 − F(x) = q, for q ∈ (0, 1).
    ///
    /// Equal to `quantile(1 − q)` but does not lose precision for tiny q.
    pub fn upper_quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain {
                value: q,
                domain: "(0, 1)".into(),
            });
        }
        self.upper_quantile_unchecked(q)
    }

    pub(crate) fn lower_quantile_unchecked(&self, u: f64) -> Result<f64> {
        Ok(match *self {
            DistributionModel::LogNormal { mu, sigma2 } => (mu + sigma2.sqrt() * normal_quantile(u)).exp(),
            DistributionModel::Gamma { shape, rate } => gamma_quantile(shape, u, false)? / rate,
            DistributionModel::Uniform { lo, hi } => lo + (hi - lo) * u,
            DistributionModel::Pareto { alpha, scale } => scale * (-(-u).ln_1p() / alpha).exp(),
            DistributionModel::PointMass { at } => at,
        })
    }

    pub(crate) fn upper_quantile_unchecked(&self, q: f64) -> Result<f64> {
        Ok(match *self {
            DistributionModel::LogNormal { mu, sigma2 } => {
                (mu + sigma2.sqrt() * normal_upper_quantile(q)).exp()
            }
            DistributionModel::Gamma { shape, rate } => gamma_quantile(shape, q, true)? / rate,
            DistributionModel::Uniform { lo, hi } => hi - (hi - lo) * q,
            DistributionModel::Pareto { alpha, scale } => scale * q.powf(-1.0 / alpha),
            DistributionModel::PointMass { at } => at,
        })
    }

    /// E(Xˢ) for real s; divergent moments are flagged, not raised.
    ///
    /// Negative orders exist for LogNormal, Pareto and Uniform on positive
    /// support, and for Gamma when shape + s > 0.
    pub fn real_moment(&self, s: f64) -> Moment {
        if s == 0.0 {
            return Moment::Finite(1.0);
        }
        match *self {
            DistributionModel::LogNormal { mu, sigma2 } => Moment::Finite((s * mu + 0.5 * s * s * sigma2).exp()),
            DistributionModel::Gamma { shape, rate } => {
                if shape + s <= 0.0 {
                    Moment::Divergent
                } else {
                    Moment::Finite(gamma_ratio(shape, s) / rate.powf(s))
                }
            }
            DistributionModel::Uniform { lo, hi } => {
                if s.fract() != 0.0 && lo < 0.0 {
                    return Moment::Divergent;
                }
                if s < 0.0 && lo <= 0.0 && hi >= 0.0 {
                    return if s > -1.0 && lo == 0.0 {
                        Moment::Finite(hi.powf(s + 1.0) / ((s + 1.0) * hi))
                    } else {
                        Moment::Divergent
                    };
                }
                if s == -1.0 {
                    Moment::Finite((hi / lo).ln() / (hi - lo))
                } else {
                    Moment::Finite((hi.powf(s + 1.0) - lo.powf(s + 1.0)) / ((s + 1.0) * (hi - lo)))
                }
            }
            DistributionModel::Pareto { alpha, scale } => {
                if s >= alpha {
                    Moment::Divergent
                } else {
                    Moment::Finite(alpha * scale.powf(s) / (alpha - s))
                }
            }
            DistributionModel::PointMass { at } => Moment::Finite(at.powf(s)),
        }
    }

    /// E(Xᵏ) for integer k ≥ 1.
    pub fn raw_moment(&self, k: u32) -> Result<Moment> {
        if k == 0 {
            return Err(Error::Precondition("raw moment order must be at least 1".into()));
        }
        Ok(self.real_moment(f64::from(k)))
    }

    pub fn mean(&self) -> Moment {
        self.real_moment(1.0)
    }

    pub fn variance(&self) -> Moment {
        match *self {
            DistributionModel::LogNormal { mu, sigma2 } => {
                Moment::Finite(sigma2.exp_m1() * (2.0 * mu + sigma2).exp())
            }
            DistributionModel::Gamma { shape, rate } => Moment::Finite(shape / (rate * rate)),
            DistributionModel::Uniform { lo, hi } => Moment::Finite((hi - lo) * (hi - lo) / 12.0),
            DistributionModel::Pareto { alpha, scale } => {
                if alpha <= 2.0 {
                    Moment::Divergent
                } else {
                    Moment::Finite(scale * scale * alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0)))
                }
            }
            DistributionModel::PointMass { .. } => Moment::Finite(0.0),
        }
    }
}

/// Standard Gamma(shape, 1) quantile, solved in log space against the
/// regularized incomplete gamma functions. `upper` selects Q(a, x) = p.
fn gamma_quantile(shape: f64, p: f64, upper: bool) -> Result<f64> {
    // Wilson–Hilferty start, or the small-x power law in the lower tail.
    let z = if upper {
        normal_upper_quantile(p)
    } else {
        normal_quantile(p)
    };
    let c = 1.0 / (9.0 * shape);
    let wh = shape * (1.0 - c + z * c.sqrt()).powi(3);
    let start = if !upper && (wh <= 0.0 || p < 1e-3) {
        ((p.ln() + ln_gamma(shape + 1.0)) / shape).exp()
    } else if wh > 0.0 {
        wh
    } else {
        shape
    };

    let ln_gamma_a = ln_gamma(shape);
    // residual in t = ln x, increasing in t for both tails
    let resid = |t: f64| {
        let x = t.exp();
        if upper {
            p - gamma_ur(shape, x)
        } else {
            gamma_lr(shape, x) - p
        }
    };
    let dresid = |t: f64| {
        let x = t.exp();
        // x · density(x)
        (shape * x.ln() - x - ln_gamma_a).exp()
    };
    let (lo, hi) = (-745.0_f64, 709.0_f64);
    let t = solve_bracketed(resid, dresid, lo, hi, Some(start.ln()), 400)?;
    Ok(t.exp())
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl FromStr for DistributionModel {
    type Err = Error;

    /// Parses `lognormal:<mu>:<sigma2>`, `gamma:<shape>:<rate>`,
    /// `uniform:<a>:<b>`, `pareto:<alpha>[:<scale>]` or `point:<c>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let nums = parts[1..]
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("not a number in {s:?}: {p:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let family = parts[0].to_ascii_lowercase();
        match (family.as_str(), nums.as_slice()) {
            ("lognormal", [mu, sigma2]) => DistributionModel::lognormal(*mu, *sigma2),
            ("gamma", [shape, rate]) => DistributionModel::gamma(*shape, *rate),
            ("uniform", [a, b]) => DistributionModel::uniform(*a, *b),
            ("pareto", [alpha]) => DistributionModel::pareto(*alpha, 1.0),
            ("pareto", [alpha, scale]) => DistributionModel::pareto(*alpha, *scale),
            ("point", [c]) => DistributionModel::point_mass(*c),
            _ => Err(Error::InvalidParameter(format!(
                "unrecognized distribution spec {s:?}; expected e.g. lognormal:2:1, gamma:100:1, uniform:1:2, pareto:10"
            ))),
        }
    }
}
