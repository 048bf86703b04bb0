//! Generator (activation) functions g of a regular mean, with inverses,
//! derivatives and input ranges.
//!
//! The built-ins are the five generators of the classical table of means:
//! identity, `log`, `1/x`, `x^p` and `exp`. New generators can be derived
//! from existing ones by an affine map (`a·g + b`) or a convex blend
//! (`g + t·(h − g)`), or registered programmatically with
//! [`Generator::custom`]. Derived and custom generators fall back to numeric
//! inversion and, when no derivative is supplied, to central differences.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bracket_collapsed, solve_bracketed};

/// Default residual tolerance of [`invert`].
pub const DEFAULT_INVERT_TOL: f64 = 1e-12;
/// Iteration cap for the bisection in [`invert`].
pub const DEFAULT_MAX_ITER: usize = 200;
/// Default number of grid points for slope estimates.
pub const DEFAULT_GRID_POINTS: usize = 10_001;

/// A compact interval `[lo, hi]` with finite `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "interval requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `points` equally spaced values including both endpoints.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => {
                let step = self.width() / (points - 1) as f64;
                (0..points)
                    .map(|i| {
                        if i == points - 1 {
                            self.hi
                        } else {
                            self.lo + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Parses `lo:hi`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("expected lo:hi, got {s:?}")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("not a number: {v:?}")))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

/// Input range Ω: an interval whose ends may be open, closed or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Domain {
    pub const REAL: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };

    pub const POSITIVE: Domain = Domain {
        lo: 0.0,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };

    pub fn open(lo: f64, hi: f64) -> Self {
        Domain {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn closed(interval: Interval) -> Self {
        Domain {
            lo: interval.lo,
            hi: interval.hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn contains_interval(&self, b: &Interval) -> bool {
        self.contains(b.lo) && self.contains(b.hi)
    }

    /// Whether every point of `other` lies in `self`.
    pub fn covers(&self, other: &Domain) -> bool {
        let lo_ok = self.lo < other.lo
            || (self.lo == other.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = self.hi > other.hi
            || (self.hi == other.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Domain {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    /// A compact box well inside the domain, used for randomized checks.
    pub fn default_box(&self) -> Interval {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (false, false) => Interval { lo: -3.0, hi: 3.0 },
            (true, false) if self.lo == 0.0 => Interval { lo: 0.5, hi: 4.0 },
            (true, false) => Interval {
                lo: self.lo + 0.5,
                hi: self.lo + 4.0,
            },
            (false, true) => Interval {
                lo: self.hi - 4.0,
                hi: self.hi - 0.5,
            },
            (true, true) => {
                let w = self.hi - self.lo;
                Interval {
                    lo: self.lo + 0.1 * w,
                    hi: self.hi - 0.1 * w,
                }
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        let show = |v: f64| {
            if v == f64::INFINITY {
                "∞".to_string()
            } else if v == f64::NEG_INFINITY {
                "-∞".to_string()
            } else {
                v.to_string()
            }
        };
        write!(f, "{l}{}, {}{r}", show(self.lo), show(self.hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        }
    }

    fn flip(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }
}

/// The built-in generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinKind {
    Identity,
    Log,
    Reciprocal,
    Power,
    Exp,
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub(crate) enum Kind {
    Identity,
    Log,
    Reciprocal,
    Power(f64),
    Exp,
    Affine {
        base: Arc<Generator>,
        scale: f64,
        shift: f64,
    },
    Blend {
        from: Arc<Generator>,
        to: Arc<Generator>,
        t: f64,
    },
    Custom {
        forward: ScalarFn,
        derivative: Option<ScalarFn>,
        inverse: Option<ScalarFn>,
    },
}

/// A continuous, strictly monotone generator g on its input range Ω.
///
/// Values are immutable and cheap to clone; derived generators share their
/// parents through `Arc`.
#[derive(Clone)]
pub struct Generator {
    name: String,
    domain: Domain,
    direction: Direction,
    pub(crate) kind: Kind,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("direction", &self.direction)
            .finish()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Builds one of the built-in generators. `p` is required for `Power` and
/// must be strictly positive.
pub fn make_builtin(kind: BuiltinKind, p: Option<f64>) -> Result<Generator> {
    let (name, domain, direction, kind) = match kind {
        BuiltinKind::Identity => ("identity".to_string(), Domain::REAL, Direction::Increasing, Kind::Identity),
        BuiltinKind::Log => ("log".to_string(), Domain::POSITIVE, Direction::Increasing, Kind::Log),
        BuiltinKind::Reciprocal => (
            "reciprocal".to_string(),
            Domain::POSITIVE,
            Direction::Decreasing,
            Kind::Reciprocal,
        ),
        BuiltinKind::Power => {
            let p = p.ok_or_else(|| Error::InvalidParameter("power generator needs an exponent p".into()))?;
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "power generator requires p > 0, got {p}"
                )));
            }
            (format!("power:{p}"), Domain::POSITIVE, Direction::Increasing, Kind::Power(p))
        }
        BuiltinKind::Exp => ("exp".to_string(), Domain::REAL, Direction::Increasing, Kind::Exp),
    };
    Ok(Generator {
        name,
        domain,
        direction,
        kind,
    })
}

impl Generator {
    pub fn identity() -> Self {
        make_builtin(BuiltinKind::Identity, None).expect("identity is always valid")
    }

    pub fn log() -> Self {
        make_builtin(BuiltinKind::Log, None).expect("log is always valid")
    }

    pub fn reciprocal() -> Self {
        make_builtin(BuiltinKind::Reciprocal, None).expect("reciprocal is always valid")
    }

    pub fn power(p: f64) -> Result<Self> {
        make_builtin(BuiltinKind::Power, Some(p))
    }

    pub fn exp() -> Self {
        make_builtin(BuiltinKind::Exp, None).expect("exp is always valid")
    }

    /// Registers a programmatic generator.
    ///
    /// `forward` must be continuous and strictly monotone on `domain` in the
    /// stated direction. Missing derivatives are replaced by central
    /// differences and missing inverses by numeric inversion.
    pub fn custom(
        name: impl Into<String>,
        domain: Domain,
        direction: Direction,
        forward: ScalarFn,
        derivative: Option<ScalarFn>,
        inverse: Option<ScalarFn>,
    ) -> Self {
        Generator {
            name: name.into(),
            domain,
            direction,
            kind: Kind::Custom {
                forward,
                derivative,
                inverse,
            },
        }
    }

    /// `scale·g + shift`. The regular mean is unchanged by this map.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale.is_finite() && shift.is_finite()) || scale == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "affine map needs finite scale != 0 and finite shift, got ({scale}, {shift})"
            )));
        }
        let direction = if scale < 0.0 {
            self.direction.flip()
        } else {
            self.direction
        };
        Ok(Generator {
            name: format!("{scale}*{}+{shift}", self.name),
            domain: self.domain,
            direction,
            kind: Kind::Affine {
                base: Arc::new(self.clone()),
                scale,
                shift,
            },
        })
    }

    /// `−g` when g is decreasing, `g` otherwise.
    pub fn to_increasing(&self) -> Self {
        match self.direction {
            Direction::Increasing => self.clone(),
            Direction::Decreasing => {
                let mut neg = self.affine(-1.0, 0.0).expect("negation is a valid affine map");
                neg.name = format!("-{}", self.name);
                neg
            }
        }
    }

    /// The convex path `g + t·(h − g)` for `t ∈ [0, 1]` on the common domain.
    ///
    /// Both generators must share the monotone direction, which makes every
    /// point of the path strictly monotone as well.
    pub fn blend(&self, other: &Generator, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("blend weight must lie in [0, 1], got {t}")));
        }
        if self.direction != other.direction {
            return Err(Error::InvalidParameter(format!(
                "cannot blend {} ({:?}) with {} ({:?}): directions differ",
                self.name, self.direction, other.name, other.direction
            )));
        }
        Ok(Generator {
            name: format!("{}+{t}*({}-{})", self.name, other.name, self.name),
            domain: self.domain.intersect(&other.domain),
            direction: self.direction,
            kind: Kind::Blend {
                from: Arc::new(self.clone()),
                to: Arc::new(other.clone()),
                t,
            },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Whether the inverse and derivative are available in closed form.
    pub fn has_closed_form(&self) -> bool {
        match &self.kind {
            Kind::Identity | Kind::Log | Kind::Reciprocal | Kind::Power(_) | Kind::Exp => true,
            Kind::Affine { base, .. } => base.has_closed_form(),
            Kind::Blend { .. } => false,
            Kind::Custom {
                derivative, inverse, ..
            } => derivative.is_some() && inverse.is_some(),
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                value: x,
                domain: self.domain.to_string(),
            })
        }
    }

    /// g(x). Errors outside Ω, including at an open endpoint such as 0 for
    /// `log`, so no infinities are ever produced.
    pub fn forward(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.eval(x))
    }

    /// g(x) without the domain check.
    #[inline]
    pub(crate) fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Identity => x,
            Kind::Log => x.ln(),
            Kind::Reciprocal => 1.0 / x,
            Kind::Power(p) => x.powf(*p),
            Kind::Exp => x.exp(),
            Kind::Affine { base, scale, shift } => scale * base.eval(x) + shift,
            Kind::Blend { from, to, t } => {
                let a = from.eval(x);
                let b = to.eval(x);
                a + t * (b - a)
            }
            Kind::Custom { forward, .. } => forward(x),
        }
    }

    /// g′(x).
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.eval_derivative(x))
    }

    pub(crate) fn eval_derivative(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Identity => 1.0,
            Kind::Log => 1.0 / x,
            Kind::Reciprocal => -1.0 / (x * x),
            Kind::Power(p) => p * x.powf(p - 1.0),
            Kind::Exp => x.exp(),
            Kind::Affine { base, scale, .. } => scale * base.eval_derivative(x),
            Kind::Blend { from, to, t } => {
                let a = from.eval_derivative(x);
                let b = to.eval_derivative(x);
                a + t * (b - a)
            }
            Kind::Custom {
                derivative: Some(d),
                ..
            } => d(x),
            Kind::Custom { .. } => self.central_difference(x),
        }
    }

    /// Central difference with step cbrt(ε)·max(1, |x|), shrunk so that both
    /// evaluation points stay inside Ω.
    pub fn central_difference(&self, x: f64) -> f64 {
        let mut h = f64::EPSILON.cbrt() * x.abs().max(1.0);
        while !(self.domain.contains(x - h) && self.domain.contains(x + h)) && h > f64::EPSILON {
            h *= 0.5;
        }
        (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
    }

    /// g⁻¹(y): closed form where available, numeric otherwise.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y.is_nan() {
            return Err(Error::NumericFailure("cannot invert NaN".into()));
        }
        match &self.kind {
            Kind::Identity => Ok(y),
            Kind::Log => self.in_image(y, y.exp()),
            Kind::Reciprocal => self.in_image(y, 1.0 / y),
            Kind::Power(p) => self.in_image(y, y.powf(1.0 / p)),
            Kind::Exp => self.in_image(y, y.ln()),
            Kind::Affine { base, scale, shift } => base.inverse((y - shift) / scale),
            Kind::Custom {
                inverse: Some(inv), ..
            } => self.in_image(y, inv(y)),
            Kind::Blend { .. } | Kind::Custom { .. } => self.numeric_inverse(y, None),
        }
    }

    /// g⁻¹(y) restricted to a bracket known to contain the answer.
    pub(crate) fn inverse_within(&self, y: f64, lo: f64, hi: f64) -> Result<f64> {
        if self.has_closed_form() {
            return self.inverse(y);
        }
        self.numeric_inverse(y, Some((lo, hi)))
    }

    fn in_image(&self, y: f64, x: f64) -> Result<f64> {
        if x.is_nan() || !self.domain.contains(x) {
            return Err(Error::OutOfRange {
                target: y,
                lo: f64::NAN,
                hi: f64::NAN,
            });
        }
        Ok(x)
    }

    /// Safeguarded Newton on a bracket, grown geometrically inside Ω when
    /// none is supplied.
    fn numeric_inverse(&self, y: f64, bracket: Option<(f64, f64)>) -> Result<f64> {
        let sign = self.direction.sign();
        let resid = |x: f64| sign * (self.eval(x) - y);
        let (lo, hi) = match bracket {
            Some(b) => b,
            None => self.find_bracket(y)?,
        };
        let slope = |x: f64| sign * self.eval_derivative(x);
        if let Kind::Blend { from, to, t } = &self.kind {
            // g + t(h − g) = y has its root between g⁻¹(y) and h⁻¹(y)
            if let (Ok(a), Ok(b)) = (from.inverse(y), to.inverse(y)) {
                let (a_lo, a_hi) = (a.min(b).max(lo), a.max(b).min(hi));
                if a_lo < a_hi {
                    let start = Some(a + t * (b - a));
                    if let Ok(x) = solve_bracketed(resid, slope, a_lo, a_hi, start, DEFAULT_MAX_ITER) {
                        return Ok(x);
                    }
                }
            }
        }
        solve_bracketed(resid, slope, lo, hi, None, DEFAULT_MAX_ITER)
    }

    fn find_bracket(&self, y: f64) -> Result<(f64, f64)> {
        let d = self.domain;
        let b = d.default_box();
        let (mut lo, mut hi) = (b.lo, b.hi);
        let sign = self.direction.sign();
        let resid = |x: f64| sign * (self.eval(x) - y);
        for _ in 0..2100 {
            let (rl, rh) = (resid(lo), resid(hi));
            if rl <= 0.0 && rh >= 0.0 {
                return Ok((lo, hi));
            }
            if rl > 0.0 {
                // move lo towards the lower end of Ω
                let next = if d.lo.is_finite() {
                    d.lo + 0.5 * (lo - d.lo)
                } else {
                    lo - 2.0 * (hi - lo).max(1.0)
                };
                if next == lo || !d.contains(next) && !(d.lo_closed && next == d.lo) {
                    break;
                }
                hi = lo;
                lo = next;
            } else {
                let next = if d.hi.is_finite() {
                    d.hi - 0.5 * (d.hi - hi)
                } else {
                    hi + 2.0 * (hi - lo).max(1.0)
                };
                if next == hi || !next.is_finite() || !d.contains(next) && !(d.hi_closed && next == d.hi) {
                    break;
                }
                lo = hi;
                hi = next;
            }
        }
        Err(Error::OutOfRange {
            target: y,
            lo: self.eval(lo).min(self.eval(hi)),
            hi: self.eval(lo).max(self.eval(hi)),
        })
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// Parses `identity`, `log`, `reciprocal`, `power:<p>` or `exp`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let kind = match head.to_ascii_lowercase().as_str() {
            "identity" | "id" | "arithmetic" => BuiltinKind::Identity,
            "log" | "geometric" => BuiltinKind::Log,
            "reciprocal" | "harmonic" => BuiltinKind::Reciprocal,
            "power" => BuiltinKind::Power,
            "exp" | "exponential" => BuiltinKind::Exp,
            other => {
                return Err(Error::InvalidParameter(format!("unknown generator {other:?}")));
            }
        };
        let p = match (kind, arg) {
            (BuiltinKind::Power, Some(a)) => Some(
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad power exponent {a:?}")))?,
            ),
            (BuiltinKind::Power, None) => {
                return Err(Error::InvalidParameter("power generator needs power:<p>".into()));
            }
            (_, Some(a)) => {
                return Err(Error::InvalidParameter(format!(
                    "generator {head:?} takes no argument, got {a:?}"
                )));
            }
            (_, None) => None,
        };
        make_builtin(kind, p)
    }
}

/// Numeric inversion of g by bisection on `bracket`.
///
/// Returns x with |g(x) − y| ≤ `tol`. Errors when `y` lies outside the
/// image of the bracket or when the iteration cap is reached first.
pub fn invert(g: &Generator, y: f64, bracket: Interval, tol: f64) -> Result<f64> {
    for x in [bracket.lo, bracket.hi] {
        g.check_domain(x)?;
    }
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let (g_lo, g_hi) = (g.eval(lo), g.eval(hi));
    let (img_lo, img_hi) = (g_lo.min(g_hi), g_lo.max(g_hi));
    if !(y >= img_lo && y <= img_hi) {
        return Err(Error::OutOfRange {
            target: y,
            lo: img_lo,
            hi: img_hi,
        });
    }
    let sign = if g_hi >= g_lo { 1.0 } else { -1.0 };
    for _ in 0..DEFAULT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let r = sign * (g.eval(mid) - y);
        if r.abs() <= tol {
            return Ok(mid);
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if bracket_collapsed(lo, hi) {
            let best = if (g.eval(lo) - y).abs() <= (g.eval(hi) - y).abs() { lo } else { hi };
            if (g.eval(best) - y).abs() <= tol {
                return Ok(best);
            }
            return Err(Error::NumericFailure(format!(
                "bisection bracket collapsed at {best} with residual {} > tol {tol}",
                (g.eval(best) - y).abs()
            )));
        }
    }
    Err(Error::NumericFailure(format!(
        "bisection did not reach tol {tol} in {DEFAULT_MAX_ITER} iterations"
    )))
}

fn check_grid_args(g: &Generator, b: &Interval, grid_points: usize) -> Result<()> {
    if grid_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "slope estimates need at least 2 grid points, got {grid_points}"
        )));
    }
    if !g.domain.contains_interval(b) {
        return Err(Error::Domain {
            value: if g.domain.contains(b.lo) { b.hi } else { b.lo },
            domain: g.domain.to_string(),
        });
    }
    Ok(())
}

/// Grid estimate of sup |g′| on `b`; a lower bound of the true supremum.
pub fn estimate_lipschitz(g: &Generator, b: Interval, grid_points: usize) -> Result<f64> {
    check_grid_args(g, &b, grid_points)?;
    Ok(b.grid(grid_points)
        .into_iter()
        .map(|x| g.eval_derivative(x).abs())
        .fold(0.0, f64::max))
}

/// Grid estimate of inf |g′| on `b`; an upper bound of the true infimum.
pub fn min_slope(g: &Generator, b: Interval, grid_points: usize) -> Result<f64> {
    check_grid_args(g, &b, grid_points)?;
    let m = b
        .grid(grid_points)
        .into_iter()
        .map(|x| g.eval_derivative(x).abs())
        .fold(f64::INFINITY, f64::min);
    if !(m > 1e-300) || m.is_nan() {
        return Err(Error::DegenerateSlope(m));
    }
    Ok(m)
}
