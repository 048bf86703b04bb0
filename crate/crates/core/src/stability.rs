//! Continuity of M_g in the generator g.
//!
//! For increasing generators g, h on a compact B with slopes bounded below,
//!
//! ‖M_g − M_h‖∞ ≤ (L + 1/m)·‖g − h‖∞,
//!
//! with L a Lipschitz constant of g⁻¹ (1 / min slope of g) and m the smaller
//! of the two minimum slopes. Everything here is a grid estimate: the sup
//! of |M_g − M_h| is a maximum over grid tuples, and L, m and ‖g − h‖∞ are
//! read off the same grid on B.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::rng_stream;
use crate::error::{Error, Result};
use crate::generator::{min_slope, Generator, Interval};

/// Relative slack allowed on top of the bound when deciding `satisfied`.
pub const BOUND_SLACK: f64 = 1e-6;

/// Largest n evaluated on an exhaustive grid; larger n use random points.
pub const MAX_EXHAUSTIVE_N: usize = 3;

const GRID_DISCLAIMER: &str = "sup-norms, L and m are grid estimates on the evaluation grid; \
    the comparison carries no guarantee between grid points";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParts {
    /// Lipschitz constant of g⁻¹, estimated as 1 / min slope of g.
    pub lipschitz_inverse: f64,
    /// Smaller of the two minimum slopes.
    pub min_slope: f64,
    /// ‖g − h‖∞ on the grid of B.
    pub generator_distance: f64,
    /// L + 1/m
    pub bound_constant: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub g: String,
    pub h: String,
    pub interval: Interval,
    pub n: usize,
    pub sup_mean_distance: f64,
    /// Point of A where the largest distance was observed.
    pub argmax: Vec<f64>,
    pub generator_distance: f64,
    pub lipschitz_inverse: f64,
    pub min_slope: f64,
    pub bound_constant: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub grid_points: usize,
    /// "exhaustive" or "random"
    pub sampling: String,
    pub points_evaluated: u64,
    pub disclaimer: String,
}

fn check_box(g: &Generator, b: &Interval) -> Result<()> {
    if g.domain().contains_interval(b) {
        Ok(())
    } else {
        Err(Error::Configuration(format!(
            "box {b} is not inside the input range {} of generator {g}",
            g.domain()
        )))
    }
}

fn normalized(g: &Generator, h: &Generator) -> (Generator, Generator) {
    (g.to_increasing(), h.to_increasing())
}

/// Components of the bound (L + 1/m)·‖g − h‖∞ on `b`, after turning
/// decreasing generators into increasing ones by negation.
pub fn stability_bound_parts(g: &Generator, h: &Generator, b: Interval, grid: usize) -> Result<BoundParts> {
    check_box(g, &b)?;
    check_box(h, &b)?;
    let (g, h) = normalized(g, h);
    let slope_g = min_slope(&g, b, grid)?;
    let slope_h = min_slope(&h, b, grid)?;
    let distance = b
        .grid(grid)
        .into_iter()
        .map(|x| (g.eval(x) - h.eval(x)).abs())
        .fold(0.0, f64::max);
    let lipschitz_inverse = 1.0 / slope_g;
    let m = slope_g.min(slope_h);
    let constant = lipschitz_inverse + 1.0 / m;
    Ok(BoundParts {
        lipschitz_inverse,
        min_slope: m,
        generator_distance: distance,
        bound_constant: constant,
        bound: constant * distance,
    })
}

/// (L + 1/m)·‖g − h‖∞ on a grid of `b`.
pub fn stability_bound(g: &Generator, h: &Generator, b: Interval, grid: usize) -> Result<f64> {
    Ok(stability_bound_parts(g, h, b, grid)?.bound)
}

struct Tables {
    x: Vec<f64>,
    g: Vec<f64>,
    h: Vec<f64>,
}

impl Tables {
    fn new(g: &Generator, h: &Generator, b: Interval, grid: usize) -> Self {
        let x = b.grid(grid);
        Tables {
            g: x.iter().map(|&v| g.eval(v)).collect(),
            h: x.iter().map(|&v| h.eval(v)).collect(),
            x,
        }
    }
}

/// M_g from precomputed generator values at points spanning [lo, hi].
fn mean_from_values(gen: &Generator, values: &[f64], lo: f64, hi: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let avg = values.iter().sum::<f64>() / values.len() as f64;
    Ok(gen.inverse_within(avg, lo, hi)?.clamp(lo, hi))
}

fn distance_at(
    g: &Generator,
    h: &Generator,
    gv: &[f64],
    hv: &[f64],
    lo: f64,
    hi: f64,
) -> Result<f64> {
    Ok((mean_from_values(g, gv, lo, hi)? - mean_from_values(h, hv, lo, hi)?).abs())
}

#[derive(Clone, Copy)]
struct Best {
    distance: f64,
    at: [usize; MAX_EXHAUSTIVE_N],
}

impl Best {
    const NONE: Best = Best { distance: -1.0, at: [0; MAX_EXHAUSTIVE_N] };

    fn pick(self, other: Best) -> Best {
        // ties go to the lexicographically smaller tuple for determinism
        if other.distance > self.distance || (other.distance == self.distance && other.at < self.at) {
            other
        } else {
            self
        }
    }
}

/// Exhaustive max over nondecreasing index tuples; the mean is symmetric,
/// so the other orderings add nothing.
fn exhaustive(g: &Generator, h: &Generator, t: &Tables, n: usize) -> Result<(Best, u64)> {
    let k = t.x.len();
    let per_first = |i: usize| -> Result<(Best, u64)> {
        let mut best = Best::NONE;
        let mut count = 0u64;
        let mut visit = |idx: &[usize]| -> Result<()> {
            let (mut gv, mut hv) = ([0.0; MAX_EXHAUSTIVE_N], [0.0; MAX_EXHAUSTIVE_N]);
            for (k, &j) in idx.iter().enumerate() {
                gv[k] = t.g[j];
                hv[k] = t.h[j];
            }
            let m = idx.len();
            let (lo, hi) = (t.x[idx[0]], t.x[idx[m - 1]]);
            let d = distance_at(g, h, &gv[..m], &hv[..m], lo, hi)?;
            let mut at = [0; MAX_EXHAUSTIVE_N];
            at[..idx.len()].copy_from_slice(idx);
            best = best.pick(Best { distance: d, at });
            count += 1;
            Ok(())
        };
        match n {
            1 => visit(&[i])?,
            2 => {
                for j in i..k {
                    visit(&[i, j])?;
                }
            }
            _ => {
                for j in i..k {
                    for l in j..k {
                        visit(&[i, j, l])?;
                    }
                }
            }
        }
        Ok((best, count))
    };
    let parts = (0..k).into_par_iter().map(per_first).collect::<Result<Vec<_>>>()?;
    Ok(parts
        .into_iter()
        .fold((Best::NONE, 0), |(b, c), (pb, pc)| (b.pick(pb), c + pc)))
}

fn report(
    g: &Generator,
    h: &Generator,
    b: Interval,
    n: usize,
    grid: usize,
    parts: BoundParts,
    sup: f64,
    argmax: Vec<f64>,
    sampling: &str,
    points: u64,
) -> StabilityReport {
    StabilityReport {
        g: g.name().to_string(),
        h: h.name().to_string(),
        interval: b,
        n,
        sup_mean_distance: sup,
        argmax,
        generator_distance: parts.generator_distance,
        lipschitz_inverse: parts.lipschitz_inverse,
        min_slope: parts.min_slope,
        bound_constant: parts.bound_constant,
        bound: parts.bound,
        satisfied: sup <= parts.bound * (1.0 + BOUND_SLACK),
        grid_points: grid,
        sampling: sampling.to_string(),
        points_evaluated: points,
        disclaimer: GRID_DISCLAIMER.to_string(),
    }
}

/// Measures ‖M_g − M_h‖∞ over the grid `bⁿ` (exhaustive, n ≤ 3) and
/// compares it with the stability bound on `b`.
pub fn verify_stability(g: &Generator, h: &Generator, b: Interval, n: usize, grid: usize) -> Result<StabilityReport> {
    if n == 0 || n > MAX_EXHAUSTIVE_N {
        return Err(Error::Configuration(format!(
            "exhaustive grids support 1 ≤ n ≤ {MAX_EXHAUSTIVE_N}, got {n}; use random sampling"
        )));
    }
    let parts = stability_bound_parts(g, h, b, grid)?;
    let (g, h) = normalized(g, h);
    let tables = Tables::new(&g, &h, b, grid);
    let (best, count) = exhaustive(&g, &h, &tables, n)?;
    let argmax = best.at[..n].iter().map(|&j| tables.x[j]).collect();
    Ok(report(&g, &h, b, n, grid, parts, best.distance, argmax, "exhaustive", count))
}

/// As [`verify_stability`] but over `points` uniform random points of bⁿ,
/// for sample sizes too large for a full grid. `grid` is used for L, m and
/// ‖g − h‖∞.
pub fn verify_stability_sampled(
    g: &Generator,
    h: &Generator,
    b: Interval,
    n: usize,
    grid: usize,
    points: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if n == 0 || points == 0 {
        return Err(Error::Configuration("need n ≥ 1 and at least one random point".into()));
    }
    let parts = stability_bound_parts(g, h, b, grid)?;
    let (g, h) = normalized(g, h);
    let chunk = 4096;
    let chunks = points.div_ceil(chunk);
    let per_chunk = |c: usize| -> Result<(f64, Vec<f64>)> {
        let mut rng = rng_stream(seed, c as u64);
        let mut best = (-1.0, Vec::new());
        let mut x = vec![0.0; n];
        let (mut gv, mut hv) = (vec![0.0; n], vec![0.0; n]);
        for _ in 0..chunk.min(points - c * chunk) {
            for v in x.iter_mut() {
                *v = b.lo + (b.hi - b.lo) * rng.random::<f64>();
            }
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (i, &v) in x.iter().enumerate() {
                gv[i] = g.eval(v);
                hv[i] = h.eval(v);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let d = distance_at(&g, &h, &gv, &hv, lo, hi)?;
            if d > best.0 {
                best = (d, x.clone());
            }
        }
        Ok(best)
    };
    let results = (0..chunks).into_par_iter().map(per_chunk).collect::<Result<Vec<_>>>()?;
    let (sup, argmax) = results
        .into_iter()
        .fold((-1.0, Vec::new()), |acc, r| if r.0 > acc.0 { r } else { acc });
    Ok(report(&g, &h, b, n, grid, parts, sup, argmax, "random", points as u64))
}

/// Measured sup distance between M_g and M_{h_t}, h_t = g + t·(h − g), for
/// each `t`.
pub fn shrinking_perturbations(
    g: &Generator,
    h: &Generator,
    b: Interval,
    n: usize,
    grid: usize,
    ts: &[f64],
) -> Result<Vec<(f64, StabilityReport)>> {
    let (g, h) = normalized(g, h);
    ts.iter()
        .map(|&t| {
            // the end points are the generators themselves, not numeric blends
            let ht = if t == 0.0 {
                g.clone()
            } else if t == 1.0 {
                h.clone()
            } else {
                g.blend(&h, t)?
            };
            Ok((t, verify_stability(&g, &ht, b, n, grid)?))
        })
        .collect()
}
