//! Confusion matrices and the ordinal evaluation metrics: quadratic weighted
//! kappa, minimum sensitivity, MAE, CCR, 1-off accuracy and GMSEC.
//!
//! Rows are true classes, columns are predicted classes, both 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    num_classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn from_labels(y_true: &[usize], y_pred: &[usize], num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::input(format!("need at least 2 classes, got {num_classes}")));
        }
        if y_true.len() != y_pred.len() {
            return Err(Error::input(format!(
                "label lists differ in length ({} true vs {} predicted)",
                y_true.len(),
                y_pred.len()
            )));
        }
        if y_true.is_empty() {
            return Err(Error::input("label lists are empty"));
        }
        let mut counts = vec![0u64; num_classes * num_classes];
        for (pos, (&t, &p)) in y_true.iter().zip(y_pred).enumerate() {
            if t >= num_classes || p >= num_classes {
                return Err(Error::input(format!(
                    "label out of range at position {pos}: true={t}, predicted={p}, classes={num_classes}"
                )));
            }
            counts[t * num_classes + p] += 1;
        }
        Ok(Self { num_classes, counts })
    }

    pub fn from_counts(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::input("need at least 2 classes"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("confusion matrix must be square"));
        }
        let counts: Vec<u64> = rows.into_iter().flatten().collect();
        if counts.iter().all(|&c| c == 0) {
            return Err(Error::input("confusion matrix has no samples"));
        }
        Ok(Self { num_classes: n, counts })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn count(&self, true_class: usize, predicted: usize) -> u64 {
        self.counts[true_class * self.num_classes + predicted]
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        let n = self.num_classes;
        self.counts[i * n..(i + 1) * n].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        (0..self.num_classes).map(|i| self.count(i, j)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.num_classes;
        self.counts
            .iter()
            .enumerate()
            .map(move |(idx, &c)| (idx / n, idx % n, c as f64))
    }

    /// Quadratic weighted kappa with weights `(i-j)^2 / (J-1)^2`.
    ///
    /// When truth and predictions are the same single class the expected
    /// disagreement is zero; that case is reported as perfect agreement.
    pub fn qwk(&self) -> Result<f64> {
        let n = self.num_classes;
        let total = self.total() as f64;
        let scale = ((n - 1) * (n - 1)) as f64;
        let rows: Vec<f64> = (0..n).map(|i| self.row_sum(i) as f64).collect();
        let cols: Vec<f64> = (0..n).map(|j| self.col_sum(j) as f64).collect();
        let mut observed = 0.0;
        let mut expected = 0.0;
        for (i, j, o) in self.cells() {
            let d = i as f64 - j as f64;
            let w = d * d / scale;
            observed += w * o;
            expected += w * rows[i] * cols[j] / total;
        }
        if expected > 0.0 {
            Ok(1.0 - observed / expected)
        } else if observed == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::UndefinedMetric("QWK expected disagreement is zero".into()))
        }
    }

    /// Recall of class `j`, `O_jj / O_j.`; `None` when the class is empty.
    pub fn sensitivity(&self, j: usize) -> Option<f64> {
        let row = self.row_sum(j);
        (row > 0).then(|| self.count(j, j) as f64 / row as f64)
    }

    pub fn sensitivities(&self) -> Result<Vec<f64>> {
        (0..self.num_classes)
            .map(|j| {
                self.sensitivity(j).ok_or_else(|| {
                    Error::UndefinedMetric(format!("class {j} has no true samples, sensitivity undefined"))
                })
            })
            .collect()
    }

    /// Minimum sensitivity over all classes.
    pub fn ms(&self) -> Result<f64> {
        Ok(self.sensitivities()?.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Mean absolute class-index deviation.
    pub fn mae(&self) -> f64 {
        let weighted: f64 = self.cells().map(|(i, j, o)| i.abs_diff(j) as f64 * o).sum();
        weighted / self.total() as f64
    }

    /// Correct classification rate.
    pub fn ccr(&self) -> f64 {
        let diag: u64 = (0..self.num_classes).map(|i| self.count(i, i)).sum();
        diag as f64 / self.total() as f64
    }

    /// Fraction of predictions at most one class away from the truth.
    pub fn one_off(&self) -> f64 {
        let near: f64 = self
            .cells()
            .filter(|(i, j, _)| i.abs_diff(*j) <= 1)
            .map(|(_, _, o)| o)
            .sum();
        near / self.total() as f64
    }

    /// Geometric mean of the first- and last-class sensitivities.
    pub fn gmsec(&self) -> Result<f64> {
        let last = self.num_classes - 1;
        let undefined = |j: usize| Error::UndefinedMetric(format!("class {j} has no true samples, GMSEC undefined"));
        let first = self.sensitivity(0).ok_or_else(|| undefined(0))?;
        let final_class = self.sensitivity(last).ok_or_else(|| undefined(last))?;
        if first == 0.0 || final_class == 0.0 {
            return Ok(0.0);
        }
        Ok((0.5 * (first.ln() + final_class.ln())).exp())
    }

    pub fn report(&self) -> Result<MetricReport> {
        let sensitivities = self.sensitivities()?;
        Ok(MetricReport {
            qwk: self.qwk()?,
            ms: self.ms()?,
            mae: self.mae(),
            ccr: self.ccr(),
            one_off: self.one_off(),
            gmsec: self.gmsec()?,
            sensitivities,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub qwk: f64,
    pub ms: f64,
    pub mae: f64,
    pub ccr: f64,
    pub one_off: f64,
    pub gmsec: f64,
    pub sensitivities: Vec<f64>,
}

impl MetricReport {
    /// Scalar metrics by name, in report order.
    pub fn scalars(&self) -> [(&'static str, f64); 6] {
        [
            ("qwk", self.qwk),
            ("ms", self.ms),
            ("mae", self.mae),
            ("ccr", self.ccr),
            ("one_off", self.one_off),
            ("gmsec", self.gmsec),
        ]
    }
}

pub const METRIC_NAMES: [&str; 6] = ["qwk", "ms", "mae", "ccr", "one_off", "gmsec"];

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> ConfusionMatrix {
        ConfusionMatrix::from_counts(vec![vec![2, 1, 0], vec![0, 3, 1], vec![0, 0, 3]]).unwrap()
    }

    #[test]
    fn from_labels_counts() {
        let m = ConfusionMatrix::from_labels(&[0, 1, 2], &[0, 1, 2], 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.count(i, j), u64::from(i == j));
            }
        }
        let m = ConfusionMatrix::from_labels(&[0, 0, 1], &[0, 1, 1], 3).unwrap();
        assert_eq!(m.counts, vec![1, 1, 0, 0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn from_labels_errors() {
        assert!(matches!(
            ConfusionMatrix::from_labels(&[], &[], 3),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            ConfusionMatrix::from_labels(&[0, 1], &[0], 3),
            Err(Error::Input(_))
        ));
        let err = ConfusionMatrix::from_labels(&[0, 1, 3], &[0, 1, 1], 3).unwrap_err();
        assert!(err.to_string().contains("position 2"), "{err}");
    }

    #[test]
    fn identity_metrics() {
        let m = ConfusionMatrix::from_labels(&[0, 1, 2], &[0, 1, 2], 3).unwrap();
        let r = m.report().unwrap();
        assert_eq!(
            (r.qwk, r.ms, r.mae, r.ccr, r.one_off, r.gmsec),
            (1.0, 1.0, 0.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn worked_example() {
        let r = example().report().unwrap();
        assert!((r.qwk - (1.0 - 0.5 / 3.0)).abs() < 1e-12);
        assert!((r.ms - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.mae - 0.2).abs() < 1e-12);
        assert!((r.ccr - 0.8).abs() < 1e-12);
        assert!((r.one_off - 1.0).abs() < 1e-12);
        assert!((r.gmsec - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(r.sensitivities.len(), 3);
        assert!((r.sensitivities[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn independent_predictions_give_zero_kappa() {
        // Rank-one counts: O_ij = r_i c_j / N exactly.
        let m = ConfusionMatrix::from_counts(vec![vec![2, 4, 2], vec![1, 2, 1], vec![3, 6, 3]]).unwrap();
        assert!(m.qwk().unwrap().abs() < 1e-12);
    }

    #[test]
    fn constant_agreement_is_perfect() {
        let m = ConfusionMatrix::from_labels(&[1, 1, 1], &[1, 1, 1], 3).unwrap();
        assert_eq!(m.qwk().unwrap(), 1.0);
    }

    #[test]
    fn zero_extreme_sensitivity() {
        let m = ConfusionMatrix::from_counts(vec![vec![0, 2, 0], vec![0, 3, 1], vec![0, 0, 3]]).unwrap();
        assert_eq!(m.gmsec().unwrap(), 0.0);
    }

    #[test]
    fn empty_classes() {
        let m = ConfusionMatrix::from_counts(vec![vec![2, 0, 0], vec![0, 0, 0], vec![0, 0, 3]]).unwrap();
        assert!(matches!(m.ms(), Err(Error::UndefinedMetric(_))));
        assert!(m.gmsec().is_ok());
        let m = ConfusionMatrix::from_counts(vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 3]]).unwrap();
        assert!(matches!(m.gmsec(), Err(Error::UndefinedMetric(_))));
        assert!(ConfusionMatrix::from_counts(vec![vec![0, 0], vec![0, 0]]).is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = ConfusionMatrix> {
        (3usize..=8)
            .prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(0u64..=50, n), n))
            .prop_map(|mut rows| {
                for (i, row) in rows.iter_mut().enumerate() {
                    if row.iter().all(|&c| c == 0) {
                        row[i] = 1;
                    }
                }
                ConfusionMatrix::from_counts(rows).unwrap()
            })
    }

    fn reversed(m: &ConfusionMatrix) -> ConfusionMatrix {
        let n = m.num_classes();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| m.count(n - 1 - i, n - 1 - j)).collect())
            .collect();
        ConfusionMatrix::from_counts(rows).unwrap()
    }

    proptest! {
        #[test]
        fn reversal_invariance(m in matrix_strategy()) {
            let a = m.report().unwrap();
            let b = reversed(&m).report().unwrap();
            prop_assert!((a.qwk - b.qwk).abs() < 1e-12);
            prop_assert!((a.mae - b.mae).abs() < 1e-12);
            prop_assert!((a.ccr - b.ccr).abs() < 1e-12);
            prop_assert!((a.one_off - b.one_off).abs() < 1e-12);
            prop_assert!((a.gmsec - b.gmsec).abs() < 1e-12);
            let n = a.sensitivities.len();
            prop_assert_eq!(a.sensitivities[0], b.sensitivities[n - 1]);
        }

        #[test]
        fn ordering_bounds(m in matrix_strategy()) {
            let r = m.report().unwrap();
            let n = r.sensitivities.len();
            prop_assert!(r.ms <= r.ccr + 1e-15);
            prop_assert!(r.ccr <= r.one_off + 1e-15);
            prop_assert!(r.gmsec >= 0.0);
            prop_assert!(r.gmsec <= r.sensitivities[0].max(r.sensitivities[n - 1]) + 1e-15);
            prop_assert!(r.qwk <= 1.0 + 1e-15);
        }

        #[test]
        fn scaling_invariance(m in matrix_strategy(), factor in 2u64..7) {
            let n = m.num_classes();
            let scaled = ConfusionMatrix::from_counts(
                (0..n).map(|i| (0..n).map(|j| m.count(i, j) * factor).collect()).collect(),
            ).unwrap();
            let (a, b) = (m.report().unwrap(), scaled.report().unwrap());
            for ((_, x), (_, y)) in a.scalars().iter().zip(b.scalars().iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
