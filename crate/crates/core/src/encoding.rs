//! Soft-label matrices: row `k` is the target distribution used when the
//! true class is `k`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{class_distributions_with, ClassDistributionSet, ExtremeShape, SolverConfig};

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Row-stochastic `J x J` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoftLabelMatrix {
    num_classes: usize,
    entries: Vec<f64>,
}

impl SoftLabelMatrix {
    /// Builds a matrix from explicit rows, checking shape, range and row sums.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::input("a soft-label matrix needs at least 2 classes"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (k, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!("row {k} has {} entries, expected {n}", row.len())));
            }
            if row.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
                return Err(Error::input(format!("row {k} has entries outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::input(format!("row {k} sums to {sum}")));
            }
            entries.extend(row);
        }
        Ok(Self {
            num_classes: n,
            entries,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Target distribution for true class `k`.
    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.num_classes;
        &self.entries[k * n..(k + 1) * n]
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.entries[k * self.num_classes + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.num_classes)
    }

    /// One line per row, comma separated, shortest round-trip formatting,
    /// no header, trailing newline.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            for (j, q) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{q}").expect("writing to a String cannot fail");
            }
            out.push('\n');
        }
        out
    }
}

/// Probability mass of class `k`'s distribution on each of the `J` unit
/// sub-intervals, renormalised to sum to one.
pub fn soft_label_row(k: usize, dists: &ClassDistributionSet) -> Result<Vec<f64>> {
    let n = dists.len();
    let params = dists
        .get(k)
        .ok_or_else(|| Error::domain(format!("class {k} out of range for {n} classes")))?;
    let mut cdf_prev = 0.0;
    let mut row = Vec::with_capacity(n);
    for j in 1..=n {
        let cdf = if j == n { 1.0 } else { params.cdf(j as f64 / n as f64)? };
        row.push((cdf - cdf_prev).max(0.0));
        cdf_prev = cdf;
    }
    let total: f64 = row.iter().sum();
    for q in &mut row {
        *q /= total;
    }
    Ok(row)
}

pub fn encode_distributions(dists: &ClassDistributionSet) -> Result<SoftLabelMatrix> {
    let n = dists.len();
    let mut entries = Vec::with_capacity(n * n);
    for k in 0..n {
        entries.extend(soft_label_row(k, dists)?);
    }
    Ok(SoftLabelMatrix {
        num_classes: n,
        entries,
    })
}

/// Generalised-beta soft labels for `config`.
pub fn encode_matrix(config: &SolverConfig) -> Result<SoftLabelMatrix> {
    encode_matrix_with(config, ExtremeShape::Generalised)
}

pub fn encode_matrix_with(config: &SolverConfig, shape: ExtremeShape) -> Result<SoftLabelMatrix> {
    encode_distributions(&class_distributions_with(config, shape)?)
}

/// Hard 0/1 targets.
pub fn one_hot_matrix(num_classes: usize) -> Result<SoftLabelMatrix> {
    if num_classes < 2 {
        return Err(Error::input("one-hot encoding needs at least 2 classes"));
    }
    let mut entries = vec![0.0; num_classes * num_classes];
    for k in 0..num_classes {
        entries[k * num_classes + k] = 1.0;
    }
    Ok(SoftLabelMatrix { num_classes, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gb::GbParams;
    use crate::solver::{class_distributions, DEFAULT_GRID};

    fn config(j: usize, lambda: f64, eta: f64) -> SolverConfig {
        SolverConfig::new(j, lambda, eta).unwrap()
    }

    fn argmax(row: &[f64]) -> usize {
        row.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap()
    }

    #[test]
    fn uniform_distribution_gives_flat_row() {
        let mut set = class_distributions(&config(4, 1.0, 1.0)).unwrap();
        set.replace_for_test(0, GbParams::beta(1.0, 1.0).unwrap());
        let row = soft_label_row(0, &set).unwrap();
        for q in row {
            assert!((q - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn first_row_closed_form() {
        let set = class_distributions(&config(5, 1.0, 1.0)).unwrap();
        let v = set.per_class()[0].v();
        let row = soft_label_row(0, &set).unwrap();
        let expected = 1.0 - (1.0 - 0.2f64.sqrt()).powf(v);
        assert!((row[0] - expected).abs() < 1e-12);
        assert!((row[0] - 0.9201).abs() < 1e-3);
        assert!(row.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn out_of_range_class() {
        let set = class_distributions(&config(5, 1.0, 1.0)).unwrap();
        assert!(matches!(soft_label_row(5, &set), Err(Error::Domain(_))));
    }

    #[test]
    fn matrix_invariants_over_grid() {
        for j in 3..=14 {
            for &lambda in &DEFAULT_GRID {
                for &eta in &DEFAULT_GRID {
                    let m = encode_matrix(&config(j, lambda, eta)).unwrap();
                    for (k, row) in m.rows().enumerate() {
                        let sum: f64 = row.iter().sum();
                        assert!((sum - 1.0).abs() < 1e-9);
                        assert!(row.iter().all(|q| (0.0..=1.0).contains(q)));
                        assert_eq!(argmax(row), k, "J={j} lambda={lambda} eta={eta} row={row:?}");
                        for i in k..j - 1 {
                            assert!(row[i + 1] <= row[i] + 1e-12);
                        }
                        for i in 1..=k {
                            assert!(row[i - 1] <= row[i] + 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn centre_row_has_symmetric_neighbours() {
        // Only the centre class of an odd J gets a symmetric beta (u = v);
        // off-centre intermediate betas are skewed.
        for j in (3..=13).step_by(2) {
            let m = encode_matrix(&config(j, 1.0, 1.0)).unwrap();
            let k = j / 2;
            assert!((m.get(k, k - 1) - m.get(k, k + 1)).abs() < 1e-9, "J={j}");
        }
        let m = encode_matrix(&config(5, 1.0, 1.0)).unwrap();
        assert!((m.get(1, 0) - m.get(1, 2)).abs() > 1e-3);
    }

    #[test]
    fn mirrored_intermediate_rows() {
        for j in 4..=14 {
            let m = encode_matrix(&config(j, 1.0, 1.0)).unwrap();
            for k in 1..j - 1 {
                for i in 1..j - 1 {
                    assert!((m.get(k, i) - m.get(j - 1 - k, j - 1 - i)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn generalised_extremes_are_more_concentrated() {
        for j in 3..=14 {
            let cfg = config(j, 1.0, 1.0);
            let gb = encode_matrix(&cfg).unwrap();
            let standard = encode_matrix_with(&cfg, ExtremeShape::Standard).unwrap();
            assert!(gb.get(0, 0) > standard.get(0, 0), "J={j}");
        }
    }

    #[test]
    fn first_row_concentration_grows_with_lambda() {
        let first: Vec<f64> = DEFAULT_GRID
            .iter()
            .map(|&l| encode_matrix(&config(5, l, 1.0)).unwrap().get(0, 0))
            .collect();
        assert!(first.windows(2).all(|w| w[0] <= w[1]), "{first:?}");
    }

    #[test]
    fn one_hot_is_identity() {
        let m = one_hot_matrix(3).unwrap();
        for k in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(k, j), if j == k { 1.0 } else { 0.0 });
            }
        }
        assert!(one_hot_matrix(1).is_err());
    }

    #[test]
    fn from_rows_validation() {
        assert!(
            SoftLabelMatrix::from_rows(vec![vec![0.9, 0.1, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).is_ok()
        );
        assert!(SoftLabelMatrix::from_rows(vec![vec![0.9, 0.2], vec![0.0, 1.0]]).is_err());
        assert!(SoftLabelMatrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn csv_layout() {
        let csv = one_hot_matrix(3).unwrap().to_csv();
        assert_eq!(csv, "1,0,0\n0,1,0\n0,0,1\n");
    }
}
