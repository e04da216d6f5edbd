//! Per-class `GB` parameters derived from mean/variance constraints.
//!
//! Classes are 0-based here: class `c` of `J` owns the unit sub-interval
//! `[c/J, (c+1)/J]`.
//!
//! * intermediate classes (`1..J-1`) use a standard beta (`alpha = 1`)
//!   centred on the interval midpoint with standard deviation `1/(2J)`;
//! * the first class uses `alpha = 2, u = 1` and the smallest `v` meeting
//!   both the mean bound `E[X] <= 1/(2J)` and the closed-form variance bound
//!   controlled by `lambda`;
//! * the last class uses `alpha = 2, v = 0.5` and a `u` that hits the mean
//!   `(2J-1)/(2J)` unless the closed-form upper bound controlled by `eta` is
//!   smaller.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gb::GbParams;

/// Validation grid for both `lambda` and `eta`.
pub const DEFAULT_GRID: [f64; 5] = [0.5, 0.75, 1.0, 1.25, 1.5];

const FIRST_CLASS_U: f64 = 1.0;
const LAST_CLASS_V: f64 = 0.5;
const EXTREME_ALPHA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    num_classes: usize,
    lambda: f64,
    eta: f64,
}

impl SolverConfig {
    pub fn new(num_classes: usize, lambda: f64, eta: f64) -> Result<Self> {
        if num_classes < 3 {
            return Err(Error::input(format!(
                "at least 3 classes are required, got {num_classes}"
            )));
        }
        for (name, value) in [("lambda", lambda), ("eta", eta)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::input(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(Self {
            num_classes,
            lambda,
            eta,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Shape used for the two extreme classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExtremeShape {
    /// `alpha = 2` concentrated shapes.
    Generalised,
    /// Standard beta (`alpha = 1`) extremes under the same mean/variance
    /// targets; used as a comparison baseline.
    Standard,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDistributionSet {
    per_class: Vec<GbParams>,
    config: SolverConfig,
    shape: ExtremeShape,
}

impl ClassDistributionSet {
    pub fn per_class(&self) -> &[GbParams] {
        &self.per_class
    }

    pub fn get(&self, class: usize) -> Option<&GbParams> {
        self.per_class.get(class)
    }

    pub fn len(&self) -> usize {
        self.per_class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_class.is_empty()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn shape(&self) -> ExtremeShape {
        self.shape
    }

    #[cfg(test)]
    pub(crate) fn replace_for_test(&mut self, class: usize, params: GbParams) {
        self.per_class[class] = params;
    }
}

/// Midpoint-centred standard beta for an intermediate class.
///
/// With `m = (2c+1)/(2J)` and `s = 4 J^2 m (1-m) - 1`, `Beta(m s, (1-m) s)`
/// has mean `m` and standard deviation exactly `1/(2J)`, so mean +/- std
/// lands on the interval edges.
pub fn intermediate_params(class: usize, num_classes: usize) -> Result<GbParams> {
    if num_classes < 3 || class == 0 || class + 1 >= num_classes {
        return Err(Error::domain(format!(
            "class {class} is not an intermediate class of {num_classes}"
        )));
    }
    let j = num_classes as f64;
    let m = (2.0 * class as f64 + 1.0) / (2.0 * j);
    let s = 4.0 * j * j * m * (1.0 - m) - 1.0;
    GbParams::beta(m * s, (1.0 - m) * s)
}

/// Lower bound on `v` from the first-class variance constraint at `u = 1`:
/// `v >= (-7F + sqrt(F^2 + 48F)) / (2F)`, `F = (1 + lambda^2) / (2 J lambda^2)`.
pub fn first_class_variance_bound(num_classes: usize, lambda: f64) -> f64 {
    let j = num_classes as f64;
    let f = (1.0 + lambda * lambda) / (2.0 * j * lambda * lambda);
    (-7.0 * f + (f * f + 48.0 * f).sqrt()) / (2.0 * f)
}

/// Smallest `v` with `2 / ((v+2)(v+1)) <= 1/(2J)`.
pub fn first_class_mean_bound(num_classes: usize) -> f64 {
    let j = num_classes as f64;
    (-3.0 + (1.0 + 16.0 * j).sqrt()) / 2.0
}

pub fn first_class_v(config: &SolverConfig) -> Result<GbParams> {
    let v =
        first_class_variance_bound(config.num_classes, config.lambda).max(first_class_mean_bound(config.num_classes));
    GbParams::new(EXTREME_ALPHA, FIRST_CLASS_U, v)
}

/// `u` solving `4u(u+1) / ((2u+3)(2u+1)) = (2J-1)/(2J)`.
pub fn last_class_mean_target(num_classes: usize) -> f64 {
    let j = num_classes as f64;
    let m = (2.0 * j - 1.0) / (2.0 * j);
    let a = 4.0 * (1.0 - m);
    let b = 4.0 - 8.0 * m;
    let c = -3.0 * m;
    (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
}

/// Closed-form upper bound on `u` from the last-class variance constraint,
/// or `None` when the quadratic degenerates (`L >= 1` or no real root).
pub fn last_class_upper_bound(num_classes: usize, eta: f64) -> Option<f64> {
    let j = num_classes as f64;
    let k = 2.0 * j - 1.0;
    let l = (1.0 + eta * eta * k * k) / (2.0 * j * eta * eta * k);
    if l >= 1.0 {
        return None;
    }
    let b = 5.0 - 6.0 * l;
    let disc = b * b - 4.0 * (1.0 - l) * (6.0 - 35.0 / 4.0 * l);
    if disc < 0.0 {
        return None;
    }
    let u = (-b + disc.sqrt()) / (2.0 * (1.0 - l));
    (u > 0.0).then_some(u)
}

pub fn last_class_u(config: &SolverConfig) -> Result<GbParams> {
    let mean_target = last_class_mean_target(config.num_classes);
    let u = match last_class_upper_bound(config.num_classes, config.eta) {
        Some(upper) => mean_target.min(upper),
        None => mean_target,
    };
    GbParams::new(EXTREME_ALPHA, u, LAST_CLASS_V)
}

/// Standard-beta first class: `u = 1`, smallest `v` meeting
/// `1/(v+1) <= 1/(2J)` and `v/((v+2)(v+1)^2) <= 1/(4 J^2 lambda^2)`.
pub fn standard_first_class(config: &SolverConfig) -> Result<GbParams> {
    let j = config.num_classes as f64;
    let var_cap = 1.0 / (4.0 * j * j * config.lambda * config.lambda);
    let variance = |v: f64| v / ((v + 2.0) * (v + 1.0) * (v + 1.0));
    let mut lo = 2.0 * j - 1.0;
    // The variance is decreasing for v >= 1, so bisect on [lo, hi].
    let v = if variance(lo) <= var_cap {
        lo
    } else {
        let mut hi = 2.0 * lo;
        while variance(hi) > var_cap {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if variance(mid) > var_cap {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * hi {
                break;
            }
        }
        hi
    };
    GbParams::beta(FIRST_CLASS_U, v)
}

/// Mirror image of [`standard_first_class`] with `eta` in place of `lambda`.
pub fn standard_last_class(config: &SolverConfig) -> Result<GbParams> {
    let mirrored = SolverConfig::new(config.num_classes, config.eta, config.lambda)?;
    let first = standard_first_class(&mirrored)?;
    GbParams::beta(first.v(), first.u())
}

pub fn class_distributions(config: &SolverConfig) -> Result<ClassDistributionSet> {
    class_distributions_with(config, ExtremeShape::Generalised)
}

pub fn class_distributions_with(config: &SolverConfig, shape: ExtremeShape) -> Result<ClassDistributionSet> {
    let n = config.num_classes;
    let mut per_class = Vec::with_capacity(n);
    per_class.push(match shape {
        ExtremeShape::Generalised => first_class_v(config)?,
        ExtremeShape::Standard => standard_first_class(config)?,
    });
    for class in 1..n - 1 {
        per_class.push(intermediate_params(class, n)?);
    }
    per_class.push(match shape {
        ExtremeShape::Generalised => last_class_u(config)?,
        ExtremeShape::Standard => standard_last_class(config)?,
    });
    Ok(ClassDistributionSet {
        per_class,
        config: *config,
        shape,
    })
}

/// One constraint of the extreme-class systems evaluated on solved
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Evaluates the extreme-class constraints on a solved set. The closed-form
/// bounds do not guarantee every inequality; this reports which ones hold.
pub fn check_constraints(set: &ClassDistributionSet) -> Vec<ConstraintCheck> {
    const SLACK: f64 = 1e-9;
    let j = set.config.num_classes as f64;
    let lambda = set.config.lambda;
    let eta = set.config.eta;
    let first = set.per_class[0];
    let last = set.per_class[set.per_class.len() - 1];

    let upper = |name, value: f64, bound: f64| ConstraintCheck {
        name,
        value,
        bound,
        satisfied: value <= bound + SLACK,
    };
    let lower = |name, value: f64, bound: f64| ConstraintCheck {
        name,
        value,
        bound,
        satisfied: value >= bound - SLACK,
    };
    vec![
        upper("first_mean", first.mean(), 1.0 / (2.0 * j)),
        lower(
            "first_mean_minus_lambda_std",
            first.mean() - lambda * first.std_dev(),
            0.0,
        ),
        upper(
            "first_variance",
            first.variance(),
            1.0 / (4.0 * j * j * lambda * lambda),
        ),
        upper("last_mean_plus_eta_std", last.mean() + eta * last.std_dev(), 1.0),
        upper("last_variance", last.variance(), 1.0 / (4.0 * j * j * eta * eta)),
    ]
}
