use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bench::data::{generate, stratified_split, SyntheticDataset};
use crate::bench::model::train_linear;
use crate::bench::stats::{compare_runs, Comparison, SIGNIFICANCE_LEVEL};
use crate::encoding::{encode_matrix_with, one_hot_matrix, SoftLabelMatrix};
use crate::error::{Error, Result};
use crate::metrics::{ConfusionMatrix, MetricReport, METRIC_NAMES};
use crate::solver::{ExtremeShape, SolverConfig, DEFAULT_GRID};

const TEST_SEED_SALT: u64 = 0x7E57_5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// Hard 0/1 targets.
    OneHot,
    /// Standard beta soft labels for every class.
    Beta,
    /// Generalised beta (`alpha = 2`) soft labels for the extreme classes.
    Gb,
}

impl Encoding {
    pub const ALL: [Encoding; 3] = [Encoding::OneHot, Encoding::Beta, Encoding::Gb];

    pub fn name(self) -> &'static str {
        match self {
            Encoding::OneHot => "onehot",
            Encoding::Beta => "beta",
            Encoding::Gb => "gb",
        }
    }

    fn shape(self) -> Option<ExtremeShape> {
        match self {
            Encoding::OneHot => None,
            Encoding::Beta => Some(ExtremeShape::Standard),
            Encoding::Gb => Some(ExtremeShape::Generalised),
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Encoding::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::input(format!("unknown encoding '{s}' (expected onehot, beta or gb)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub num_classes: usize,
    pub samples: usize,
    pub dim: usize,
    pub noise: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub test_fraction: f64,
    pub seeds: Vec<u64>,
    pub grid: Vec<f64>,
    pub encodings: Vec<Encoding>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            num_classes: 5,
            samples: 3000,
            dim: 20,
            noise: 0.2,
            epochs: 300,
            learning_rate: 0.1,
            test_fraction: 0.2,
            seeds: derive_seeds(0, 10),
            grid: DEFAULT_GRID.to_vec(),
            encodings: Encoding::ALL.to_vec(),
        }
    }
}

/// `count` run seeds derived from a master seed with the splitmix64 mixer.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    (0..count as u64)
        .map(|run| {
            let mut z = master
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(run.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub encoding: Encoding,
    pub seed: u64,
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub validation_qwk: f64,
    pub report: MetricReport,
}

#[derive(Debug, Clone)]
pub struct TrainTestSplit {
    pub train: SyntheticDataset,
    pub test: SyntheticDataset,
    /// Indices into the full dataset.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

pub fn split_train_test(data: &SyntheticDataset, test_fraction: f64) -> TrainTestSplit {
    let (train_indices, test_indices) = stratified_split(
        data.labels(),
        data.num_classes(),
        test_fraction,
        data.seed() ^ TEST_SEED_SALT,
    );
    TrainTestSplit {
        train: data.subset(&train_indices),
        test: data.subset(&test_indices),
        train_indices,
        test_indices,
    }
}

struct Candidate {
    lambda: Option<f64>,
    eta: Option<f64>,
    matrix: SoftLabelMatrix,
}

fn candidates(config: &ExperimentConfig, encoding: Encoding) -> Result<Vec<Candidate>> {
    let Some(shape) = encoding.shape() else {
        return Ok(vec![Candidate {
            lambda: None,
            eta: None,
            matrix: one_hot_matrix(config.num_classes)?,
        }]);
    };
    let mut out = Vec::with_capacity(config.grid.len() * config.grid.len());
    for &lambda in &config.grid {
        for &eta in &config.grid {
            let solver = SolverConfig::new(config.num_classes, lambda, eta)?;
            out.push(Candidate {
                lambda: Some(lambda),
                eta: Some(eta),
                matrix: encode_matrix_with(&solver, shape)?,
            });
        }
    }
    Ok(out)
}

fn run_with_candidates(
    config: &ExperimentConfig,
    seed: u64,
    per_encoding: &[(Encoding, Vec<Candidate>)],
) -> Result<Vec<RunResult>> {
    let data = generate(config.num_classes, config.samples, config.dim, config.noise, seed)?;
    let split = split_train_test(&data, config.test_fraction);
    let mut results = Vec::with_capacity(per_encoding.len());
    for (encoding, cands) in per_encoding {
        // Strictly better validation QWK wins; ties keep grid order.
        let mut best: Option<(&Candidate, crate::bench::model::TrainedModel)> = None;
        for cand in cands {
            let trained = train_linear(&split.train, &cand.matrix, config.epochs, config.learning_rate)?;
            if best
                .as_ref()
                .is_none_or(|(_, b)| trained.validation_qwk > b.validation_qwk)
            {
                best = Some((cand, trained));
            }
        }
        let (cand, trained) = best.ok_or_else(|| Error::input("empty (lambda, eta) grid"))?;
        let all_test: Vec<usize> = (0..split.test.len()).collect();
        let predicted = trained.model.predict_all(&split.test, &all_test);
        let report = ConfusionMatrix::from_labels(split.test.labels(), &predicted, config.num_classes)?.report()?;
        results.push(RunResult {
            encoding: *encoding,
            seed,
            lambda: cand.lambda,
            eta: cand.eta,
            validation_qwk: trained.validation_qwk,
            report,
        });
    }
    Ok(results)
}

fn validate(config: &ExperimentConfig) -> Result<()> {
    if config.seeds.is_empty() {
        return Err(Error::input("at least one seed is required"));
    }
    if config.encodings.is_empty() {
        return Err(Error::input("at least one encoding is required"));
    }
    if config.grid.is_empty() {
        return Err(Error::input("the (lambda, eta) grid is empty"));
    }
    if !(config.test_fraction > 0.0 && config.test_fraction < 1.0) {
        return Err(Error::input("test fraction must be in (0, 1)"));
    }
    Ok(())
}

fn all_candidates(config: &ExperimentConfig) -> Result<Vec<(Encoding, Vec<Candidate>)>> {
    let mut encodings = config.encodings.clone();
    encodings.sort();
    encodings.dedup();
    encodings.into_iter().map(|e| Ok((e, candidates(config, e)?))).collect()
}

/// Runs every encoding on a single seed's dataset.
pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<Vec<RunResult>> {
    validate(config)?;
    run_with_candidates(config, seed, &all_candidates(config)?)
}

/// Runs all seeds (in parallel) and encodings. Results are sorted by
/// `(encoding, seed position)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunResult>> {
    validate(config)?;
    let per_encoding = all_candidates(config)?;
    let per_seed: Vec<Vec<RunResult>> = config
        .seeds
        .par_iter()
        .map(|&seed| run_with_candidates(config, seed, &per_encoding))
        .collect::<Result<_>>()?;
    let mut results: Vec<(usize, RunResult)> = per_seed
        .into_iter()
        .enumerate()
        .flat_map(|(pos, runs)| runs.into_iter().map(move |r| (pos, r)))
        .collect();
    results.sort_by_key(|(pos, r)| (r.encoding, *pos));
    Ok(results.into_iter().map(|(_, r)| r).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingSummary {
    pub encoding: Encoding,
    pub runs: usize,
    pub metrics: BTreeMap<&'static str, MeanSd>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonEntry {
    pub a: Encoding,
    pub b: Encoding,
    pub metric: &'static str,
    #[serde(flatten)]
    pub result: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// Test used for the pairwise comparisons.
    pub test: &'static str,
    pub significance_level: f64,
    /// Number of encoding pairs; the per-test threshold divides the level
    /// by this.
    pub num_comparisons: usize,
    pub threshold: f64,
    pub encodings: Vec<EncodingSummary>,
    pub comparisons: Vec<ComparisonEntry>,
}

fn metric_value(report: &MetricReport, name: &str) -> f64 {
    report
        .scalars()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, v)| v)
        .expect("known metric name")
}

/// Per-encoding mean and SD of each metric plus Welch tests between every
/// pair of encodings.
pub fn summarize(results: &[RunResult]) -> Result<Summary> {
    let mut encodings: Vec<Encoding> = results.iter().map(|r| r.encoding).collect();
    encodings.sort();
    encodings.dedup();
    let values = |enc: Encoding, metric: &str| -> Vec<f64> {
        results
            .iter()
            .filter(|r| r.encoding == enc)
            .map(|r| metric_value(&r.report, metric))
            .collect()
    };

    let summaries = encodings
        .iter()
        .map(|&enc| EncodingSummary {
            encoding: enc,
            runs: results.iter().filter(|r| r.encoding == enc).count(),
            metrics: METRIC_NAMES.iter().map(|&m| (m, MeanSd::of(&values(enc, m)))).collect(),
        })
        .collect();

    let pairs: Vec<(Encoding, Encoding)> = encodings
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| encodings[i + 1..].iter().map(move |&b| (a, b)))
        .collect();
    let num_comparisons = pairs.len().max(1);
    let mut comparisons = Vec::new();
    for &(a, b) in &pairs {
        for &metric in &METRIC_NAMES {
            let (xs, ys) = (values(a, metric), values(b, metric));
            if xs.len() < 2 || ys.len() < 2 {
                continue;
            }
            comparisons.push(ComparisonEntry {
                a,
                b,
                metric,
                result: compare_runs(&xs, &ys, num_comparisons)?,
            });
        }
    }

    Ok(Summary {
        test: "welch-unpaired",
        significance_level: SIGNIFICANCE_LEVEL,
        num_comparisons,
        threshold: SIGNIFICANCE_LEVEL / num_comparisons as f64,
        encodings: summaries,
        comparisons,
    })
}
