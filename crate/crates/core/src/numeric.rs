//! Small numerical building blocks shared by the rest of the crate:
//! compensated summation, bracketed root finding, the standard normal
//! distribution, and polygamma functions.

use std::f64::consts::{PI, SQRT_2};

use libm::erfc;

use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation.
///
/// The running compensation keeps the rounding error of a sum of `n` terms
/// at O(ε) independent of `n` and of the order of the terms, up to the final
/// rounding.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().total()
}

/// Arithmetic mean and (divisor `n - ddof`) variance with compensated sums.
pub(crate) fn mean_and_variance(values: &[f64], ddof: usize) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n <= ddof {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, ss / (n - ddof) as f64)
}

/// Returns `true` once `lo` and `hi` are adjacent (or equal) doubles, up to a
/// couple of ulps.
#[inline]
pub(crate) fn bracket_collapsed(lo: f64, hi: f64) -> bool {
    let scale = lo.abs().max(hi.abs());
    (hi - lo).abs() <= 4.0 * f64::EPSILON * scale || (hi - lo).abs() <= f64::MIN_POSITIVE
}

/// Safeguarded Newton iteration for a root of `f` on `[lo, hi]`.
///
/// `f` must change sign on the bracket. Each step takes the Newton update
/// when it stays strictly inside the current bracket and shrinks the
/// residual, and falls back to bisection otherwise, so the iteration
/// converges whenever plain bisection would. Stops when the bracket has
/// collapsed to adjacent doubles or `f` vanishes exactly.
pub(crate) fn solve_bracketed<F, D>(
    f: F,
    df: D,
    mut lo: f64,
    mut hi: f64,
    start: Option<f64>,
    max_iter: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) && (f_lo.is_nan() || f_hi.is_nan()) {
        return Err(Error::NumericFailure(format!(
            "non-finite residual on bracket [{lo}, {hi}]"
        )));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NumericFailure(format!(
            "no sign change on bracket [{lo}, {hi}]"
        )));
    }
    // orient so that f(lo) < 0 < f(hi)
    let flip = f_lo > 0.0;
    let g = |x: f64| if flip { -f(x) } else { f(x) };
    let dg = |x: f64| if flip { -df(x) } else { df(x) };

    let mut x = match start {
        Some(s) if s > lo && s < hi => s,
        _ => 0.5 * (lo + hi),
    };
    let mut prev_step = hi - lo;
    for _ in 0..max_iter {
        let fx = g(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::NumericFailure(format!("residual is NaN at {x}")));
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if bracket_collapsed(lo, hi) {
            return Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi });
        }
        let d = dg(x);
        let newton = x - fx / d;
        let step = (newton - x).abs();
        if d.is_finite() && d != 0.0 && newton > lo && newton < hi && step <= 2.0 * f64::EPSILON * x.abs() {
            // Newton has converged to rounding level
            return Ok(newton);
        }
        let use_newton = d.is_finite()
            && d != 0.0
            && newton > lo
            && newton < hi
            && step < 0.5 * prev_step;
        let next = if use_newton { newton } else { 0.5 * (lo + hi) };
        prev_step = (next - x).abs();
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Err(Error::NumericFailure(format!(
        "root finder did not converge in {max_iter} iterations (bracket [{lo}, {hi}])"
    )))
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function, Φ(x) = erfc(−x/√2)/2.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Inverse of the standard normal distribution function.
///
/// Acklam's rational approximation followed by one Halley step against the
/// erfc-based Φ, giving close to full double precision including the far
/// tails. Returns ±∞ at 0 and 1.
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    // Symmetry keeps the refinement in the tail where p is represented exactly.
    if p > 0.5 {
        return -lower_normal_quantile(1.0 - p);
    }
    lower_normal_quantile(p)
}

/// Quantile of the upper tail: the x with 1 − Φ(x) = q, accurate for tiny q.
pub fn normal_upper_quantile(q: f64) -> f64 {
    -normal_quantile(q)
}

fn lower_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    // Halley refinement. In the deep tail the residual is relative to p, so
    // the step is computed as a ratio to avoid over/underflow.
    let mut x = x;
    for _ in 0..2 {
        let cdf = normal_cdf(x);
        let pdf = normal_pdf(x);
        if pdf == 0.0 || !cdf.is_finite() {
            break;
        }
        let u = (cdf - p) / pdf;
        let step = u / (1.0 + 0.5 * x * u);
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

/// Polygamma function ψ⁽ᵏ⁾(x) for x > 0 and order k ≤ 3.
///
/// Uses the recurrence ψ⁽ᵏ⁾(x) = ψ⁽ᵏ⁾(x + 1) − (−1)ᵏ k!/x^{k+1} to shift the
/// argument above 20, then the Bernoulli asymptotic expansion.
pub fn polygamma(order: u32, x: f64) -> f64 {
    assert!(order <= 3, "polygamma implemented for orders 0..=3");
    if !(x > 0.0) {
        return f64::NAN;
    }
    // Bernoulli numbers B_2, B_4, ..., B_18
    const BERNOULLI: [f64; 9] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
        43867.0 / 798.0,
    ];
    let k = order as i32;
    let k_fact = [1.0, 1.0, 2.0, 6.0][order as usize];
    let sign = if k % 2 == 0 { -1.0 } else { 1.0 }; // (−1)^{k+1}

    let mut shift = CompensatedSum::new();
    let mut z = x;
    while z < 20.0 {
        // ψ⁽ᵏ⁾(z) = ψ⁽ᵏ⁾(z+1) + (−1)^{k+1} k!/z^{k+1}
        shift.add(sign * k_fact / z.powi(k + 1));
        z += 1.0;
    }

    let asymptotic = if order == 0 {
        let mut s = z.ln() - 0.5 / z;
        let z2 = z * z;
        let mut zp = z2;
        for (j, b) in BERNOULLI.iter().enumerate() {
            let two_j = 2.0 * (j as f64 + 1.0);
            s -= b / (two_j * zp);
            zp *= z2;
        }
        s
    } else {
        // ψ⁽ᵏ⁾(z) ~ (−1)^{k+1} [ (k−1)!/z^k + k!/(2 z^{k+1})
        //            + Σ_j B_{2j} (2j+k−1)!/((2j)! z^{2j+k}) ]
        let km1_fact = [1.0, 1.0, 1.0, 2.0][order as usize];
        let mut s = km1_fact / z.powi(k) + k_fact / (2.0 * z.powi(k + 1));
        for (j, b) in BERNOULLI.iter().enumerate() {
            let two_j = 2 * (j as i32 + 1);
            let ratio = falling_ratio(two_j + k - 1, two_j);
            s += b * ratio / z.powi(two_j + k);
        }
        sign * s
    };
    asymptotic + shift.total()
}

/// (m)! / (j)! for m ≥ j as a float product.
fn falling_ratio(m: i32, j: i32) -> f64 {
    ((j + 1)..=m).map(f64::from).product()
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Γ(a + s)/Γ(a), exact product when s is a small non-negative integer.
pub(crate) fn gamma_ratio(a: f64, s: f64) -> f64 {
    if s.fract() == 0.0 && (0.0..=64.0).contains(&s) {
        (0..s as i64).map(|i| a + i as f64).product()
    } else if s.fract() == 0.0 && (-64.0..0.0).contains(&s) && a + s > 0.0 {
        1.0 / (1..=(-s) as i64).map(|i| a - i as f64).product::<f64>()
    } else {
        ln_gamma_ratio(a, s).exp()
    }
}

/// ln Γ(a + s) − ln Γ(a) without the cancellation of subtracting two large
/// log-gammas: shift both arguments above 20 by recurrence, then use the
/// difference of Stirling series.
pub(crate) fn ln_gamma_ratio(a: f64, s: f64) -> f64 {
    if a + s <= 0.0 || a <= 0.0 {
        return ln_gamma(a + s) - ln_gamma(a);
    }
    let mut x = a;
    let mut acc = 0.0;
    while x.min(x + s) < 20.0 {
        acc += (x / (x + s)).ln();
        x += 1.0;
    }
    let y = x + s;
    // (y − ½)ln y − (x − ½)ln x − s, rearranged
    let lead = (x - 0.5) * (s / x).ln_1p() + s * y.ln() - s;
    const B: [f64; 5] = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0];
    let mut tail = 0.0;
    let (mut px, mut py) = (1.0 / x, 1.0 / y);
    let (ix2, iy2) = (px * px, py * py);
    for b in B {
        tail += b * (py - px);
        px *= ix2;
        py *= iy2;
    }
    acc + lead + tail
}

pub(crate) const TWO_PI: f64 = 2.0 * PI;
