//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the total
//! estimated error falls below `max(abs_tol, rel_tol·|I|)`. Initial
//! breakpoints can be supplied to resolve features the first pass would
//! otherwise miss (for instance a peak deep in a tail).

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::numeric::CompensatedSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * half;
    let mut error = ((kron - gauss) * half).abs();
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the
/// subintervals defined by the sorted `breaks`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    opts: QuadratureOptions,
) -> QuadratureResult {
    assert!(breaks.len() >= 2, "need at least one interval");
    let mut heap: BinaryHeap<Segment> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(&f, w[0], w[1]))
        .collect();

    let totals = |heap: &BinaryHeap<Segment>| {
        let mut v = CompensatedSum::new();
        let mut e = 0.0;
        for s in heap.iter() {
            v.add(s.value);
            e += s.error;
        }
        (v.total(), e)
    };

    let (mut value, mut error) = totals(&heap);
    loop {
        if !value.is_finite() {
            return QuadratureResult {
                value,
                error: f64::INFINITY,
                intervals: heap.len(),
                converged: false,
            };
        }
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return QuadratureResult {
                value,
                error,
                intervals: heap.len(),
                converged: true,
            };
        }
        if heap.len() >= opts.max_intervals {
            break;
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(Segment { error: 0.0, ..worst });
            let (v, e) = totals(&heap);
            value = v;
            error = e;
            if heap.iter().all(|s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // re-sum periodically to avoid drift of the running totals
        if heap.len().is_multiple_of(64) {
            let (v, e) = totals(&heap);
            value = v;
            error = e;
        }
    }
    let (value, error) = totals(&heap);
    let target = opts.abs_tol.max(opts.rel_tol * value.abs());
    QuadratureResult {
        value,
        error,
        intervals: heap.len(),
        converged: error <= target && value.is_finite(),
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> QuadratureResult {
    integrate_with_breaks(f, &[a, b], opts)
}
