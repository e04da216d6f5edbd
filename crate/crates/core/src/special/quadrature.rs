//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate falls below the tolerance. Integrable endpoint singularities such
//! as `x^(p-1)` with `0 < p < 1` are handled by repeated bisection of the
//! offending end interval; the Kronrod nodes never touch the endpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_EVALUATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

// Kronrod abscissae (descending, last one is the centre) and weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const RULE_EVALUATIONS: usize = 21;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
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

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::domain(format!("integrand is not finite at x = {x}")))
        }
    };

    let f_centre = eval(centre)?;
    let mut kronrod = WGK[10] * f_centre;
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = half * XGK[i];
        let pair = eval(centre - dx)? + eval(centre + dx)?;
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

// Below this relative width the outermost Kronrod nodes would round onto
// the interval ends.
const MIN_RELATIVE_WIDTH: f64 = 1024.0 * f64::EPSILON;

fn splittable(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (b - a) > 2.0 * MIN_RELATIVE_WIDTH * scale
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` using the
/// default evaluation budget.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_with_budget(f, a, b, tol, DEFAULT_MAX_EVALUATIONS)
}

pub fn integrate_with_budget<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_evaluations: usize,
) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::domain(format!("invalid integration interval [{a}, {b}]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }

    let first = gauss_kronrod(&mut f, a, b)?;
    let mut evaluations = RULE_EVALUATIONS;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut total_error = first.error;
    let mut frozen_error = 0.0;
    let mut splits = 0usize;
    heap.push(first);

    let summarize = |heap: &BinaryHeap<Segment>, frozen: &[Segment], evaluations: usize| {
        let (value, error) = heap
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        QuadratureResult {
            value,
            abs_error_estimate: error,
            evaluations,
        }
    };

    while total_error > tol {
        let Some(worst) = heap.pop() else { break };
        if !splittable(worst.a, worst.b) {
            frozen_error += worst.error;
            frozen.push(worst);
            if frozen_error > tol {
                // Remaining error sits in intervals that cannot be refined.
                break;
            }
            continue;
        }
        if evaluations + 2 * RULE_EVALUATIONS > max_evaluations {
            heap.push(worst);
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                partial: Some(summarize(&heap, &frozen, evaluations)),
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&mut f, worst.a, mid)?;
        let right = gauss_kronrod(&mut f, mid, worst.b)?;
        evaluations += 2 * RULE_EVALUATIONS;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        splits += 1;
        // Re-sum occasionally so incremental updates do not drift.
        if splits.is_multiple_of(256) {
            total_error = heap.iter().chain(frozen.iter()).map(|s| s.error).sum();
        }
    }

    let result = summarize(&heap, &frozen, evaluations);
    if result.abs_error_estimate > tol {
        return Err(Error::Convergence {
            what: "adaptive quadrature",
            partial: Some(result),
        });
    }
    Ok(result)
}
