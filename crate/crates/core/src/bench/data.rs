use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const LATENT_NOISE_SD: f64 = 0.1;

/// Feature matrix (row-major, `n x dim`) with ordinal labels `0..J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    features: Vec<f64>,
    dim: usize,
    labels: Vec<usize>,
    clean_labels: Vec<usize>,
    num_classes: usize,
    seed: u64,
}

impl SyntheticDataset {
    /// Wraps existing data; `clean_labels` is set to `labels`.
    pub fn from_parts(
        features: Vec<f64>,
        dim: usize,
        labels: Vec<usize>,
        num_classes: usize,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 || features.len() != labels.len() * dim {
            return Err(Error::input(format!(
                "feature buffer of length {} does not match {} samples x {dim} features",
                features.len(),
                labels.len()
            )));
        }
        if let Some(pos) = labels.iter().position(|&y| y >= num_classes) {
            return Err(Error::input(format!("label at position {pos} is out of range")));
        }
        Ok(Self {
            features,
            dim,
            clean_labels: labels.clone(),
            labels,
            num_classes,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Labels before adjacent-class corruption.
    pub fn clean_labels(&self) -> &[usize] {
        &self.clean_labels
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self {
            features,
            dim: self.dim,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            clean_labels: indices.iter().map(|&i| self.clean_labels[i]).collect(),
            num_classes: self.num_classes,
            seed: self.seed,
        }
    }
}

/// Draws a dataset whose labels are equal-frequency bins of a noisy linear
/// score, then moves each label to an adjacent class with probability
/// `p_noise` (the end classes can only move inwards).
pub fn generate(num_classes: usize, n: usize, dim: usize, p_noise: f64, seed: u64) -> Result<SyntheticDataset> {
    if num_classes < 3 {
        return Err(Error::input(format!("need at least 3 classes, got {num_classes}")));
    }
    if n < 50 * num_classes {
        return Err(Error::input(format!(
            "need at least {} samples for {num_classes} classes, got {n}",
            50 * num_classes
        )));
    }
    if dim == 0 {
        return Err(Error::input("feature dimension must be positive"));
    }
    if !(0.0..0.5).contains(&p_noise) {
        return Err(Error::input(format!("label noise must be in [0, 0.5), got {p_noise}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut direction: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = direction.iter().map(|w| w * w).sum::<f64>().sqrt();
    for w in &mut direction {
        *w /= norm;
    }

    let features: Vec<f64> = (0..n * dim).map(|_| rng.sample(StandardNormal)).collect();
    let latent: Vec<f64> = features
        .chunks_exact(dim)
        .map(|x| {
            let score: f64 = x.iter().zip(&direction).map(|(a, b)| a * b).sum();
            let jitter: f64 = rng.sample(StandardNormal);
            score + LATENT_NOISE_SD * jitter
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| latent[a].total_cmp(&latent[b]).then(a.cmp(&b)));
    let mut clean_labels = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        clean_labels[i] = rank * num_classes / n;
    }

    let last = num_classes - 1;
    let labels = clean_labels
        .iter()
        .map(|&y| {
            if rng.random::<f64>() >= p_noise {
                return y;
            }
            match y {
                0 => 1,
                y if y == last => last - 1,
                y if rng.random::<bool>() => y + 1,
                y => y - 1,
            }
        })
        .collect();

    Ok(SyntheticDataset {
        features,
        dim,
        labels,
        clean_labels,
        num_classes,
        seed,
    })
}

/// Per-class shuffled split. Returns `(kept, held_out)` indices, each sorted;
/// every class with at least two members keeps at least one sample on each
/// side.
pub fn stratified_split(
    labels: &[usize],
    num_classes: usize,
    holdout_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }
    let mut kept = Vec::new();
    let mut held = Vec::new();
    for mut members in by_class {
        members.shuffle(&mut rng);
        let count = members.len();
        let mut take = (holdout_fraction * count as f64).round() as usize;
        if count >= 2 {
            take = take.clamp(1, count - 1);
        } else {
            take = 0;
        }
        held.extend_from_slice(&members[..take]);
        kept.extend_from_slice(&members[take..]);
    }
    kept.sort_unstable();
    held.sort_unstable();
    (kept, held)
}
