use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::reg_inc_beta;

/// Family-wise significance level before correction.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
    /// Corrected per-test level `0.05 / num_comparisons`.
    pub threshold: f64,
    pub significant: bool,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Two-sided Student-t tail probability `P(|T| >= |t|)` with `df` degrees
/// of freedom.
fn two_sided_p(t: f64, df: f64) -> Result<f64> {
    if t.is_infinite() {
        return Ok(0.0);
    }
    reg_inc_beta(df / (df + t * t), 0.5 * df, 0.5)
}

/// Welch's unequal-variance two-sample t-test with a divided significance
/// level for `num_comparisons` simultaneous tests.
pub fn compare_runs(a: &[f64], b: &[f64], num_comparisons: usize) -> Result<Comparison> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::input("each sample needs at least two values"));
    }
    if num_comparisons == 0 {
        return Err(Error::input("number of comparisons must be positive"));
    }
    let threshold = SIGNIFICANCE_LEVEL / num_comparisons as f64;
    let (mean_a, var_a) = mean_var(a);
    let (mean_b, var_b) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2_a = var_a / na;
    let se2_b = var_b / nb;
    let se2 = se2_a + se2_b;

    let (t, df) = if se2 == 0.0 {
        let t = if mean_a == mean_b {
            0.0
        } else {
            f64::INFINITY.copysign(mean_a - mean_b)
        };
        (t, na + nb - 2.0)
    } else {
        let df = se2 * se2 / (se2_a * se2_a / (na - 1.0) + se2_b * se2_b / (nb - 1.0));
        ((mean_a - mean_b) / se2.sqrt(), df)
    };
    let p_value = two_sided_p(t, df)?;
    Ok(Comparison {
        t,
        df,
        p_value,
        threshold,
        significant: p_value < threshold,
    })
}
