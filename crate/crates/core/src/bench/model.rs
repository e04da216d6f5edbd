use crate::bench::data::{stratified_split, SyntheticDataset};
use crate::encoding::SoftLabelMatrix;
use crate::error::{Error, Result};
use crate::loss::reg_cce_from_logits;
use crate::metrics::ConfusionMatrix;

/// Share of the training data held out for model selection.
pub const VALIDATION_FRACTION: f64 = 0.15;

const VALIDATION_SEED_SALT: u64 = 0x05EE_D0F0_A11D;

/// Multinomial logistic model: one weight row of length `dim + 1` per class,
/// the last entry being the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    num_classes: usize,
    dim: usize,
    weights: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(num_classes: usize, dim: usize) -> Self {
        Self {
            num_classes,
            dim,
            weights: vec![0.0; num_classes * (dim + 1)],
        }
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn logits_into(&self, x: &[f64], out: &mut [f64]) {
        let stride = self.dim + 1;
        for (c, z) in out.iter_mut().enumerate() {
            let w = &self.weights[c * stride..(c + 1) * stride];
            *z = w[self.dim] + w[..self.dim].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_classes];
        self.logits_into(x, &mut out);
        out
    }

    /// Most probable class; ties go to the lowest index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let z = self.logits(x);
        let mut best = 0;
        for (c, &value) in z.iter().enumerate().skip(1) {
            if value > z[best] {
                best = c;
            }
        }
        best
    }

    pub fn predict_all(&self, data: &SyntheticDataset, indices: &[usize]) -> Vec<usize> {
        indices.iter().map(|&i| self.predict(data.row(i))).collect()
    }
}

/// Mean soft-label cross-entropy over `indices` and its gradient with
/// respect to the model weights.
pub fn batch_loss_and_grad(
    model: &LinearModel,
    data: &SyntheticDataset,
    indices: &[usize],
    labels: &SoftLabelMatrix,
) -> (f64, Vec<f64>) {
    let j = model.num_classes;
    let stride = model.dim + 1;
    let mut grad = vec![0.0; model.weights.len()];
    let mut logits = vec![0.0; j];
    let mut dz = vec![0.0; j];
    let mut loss = 0.0;
    for &i in indices {
        let x = data.row(i);
        model.logits_into(x, &mut logits);
        loss += reg_cce_from_logits(&logits, data.labels()[i], labels, &mut dz);
        for (c, &g) in dz.iter().enumerate() {
            let row = &mut grad[c * stride..(c + 1) * stride];
            for (gw, &xv) in row[..model.dim].iter_mut().zip(x) {
                *gw += g * xv;
            }
            row[model.dim] += g;
        }
    }
    let scale = 1.0 / indices.len() as f64;
    for g in &mut grad {
        *g *= scale;
    }
    (loss * scale, grad)
}

fn batch_loss(model: &LinearModel, data: &SyntheticDataset, indices: &[usize], labels: &SoftLabelMatrix) -> f64 {
    let mut logits = vec![0.0; model.num_classes];
    let mut scratch = vec![0.0; model.num_classes];
    let total: f64 = indices
        .iter()
        .map(|&i| {
            model.logits_into(data.row(i), &mut logits);
            reg_cce_from_logits(&logits, data.labels()[i], labels, &mut scratch)
        })
        .sum();
    total / indices.len() as f64
}

fn qwk_on(model: &LinearModel, data: &SyntheticDataset, indices: &[usize]) -> f64 {
    let truth: Vec<usize> = indices.iter().map(|&i| data.labels()[i]).collect();
    let predicted = model.predict_all(data, indices);
    ConfusionMatrix::from_labels(&truth, &predicted, data.num_classes())
        .and_then(|m| m.qwk())
        .unwrap_or(f64::NEG_INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
    pub validation_qwk: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub model: LinearModel,
    pub best_epoch: usize,
    pub validation_qwk: f64,
    pub train_indices: Vec<usize>,
    pub validation_indices: Vec<usize>,
    /// One entry per evaluated weight state, epoch 0 being the initial zeros.
    pub history: Vec<EpochStats>,
}

/// Full-batch gradient descent on the mean soft-label cross-entropy, keeping
/// the weights with the best validation QWK seen across epochs (latest epoch
/// on ties).
pub fn train_linear(data: &SyntheticDataset, labels: &SoftLabelMatrix, epochs: usize, lr: f64) -> Result<TrainedModel> {
    if labels.num_classes() != data.num_classes() {
        return Err(Error::input(format!(
            "label matrix has {} classes but the data has {}",
            labels.num_classes(),
            data.num_classes()
        )));
    }
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::input(format!("learning rate must be positive, got {lr}")));
    }
    let (train_indices, validation_indices) = stratified_split(
        data.labels(),
        data.num_classes(),
        VALIDATION_FRACTION,
        data.seed() ^ VALIDATION_SEED_SALT,
    );
    if train_indices.is_empty() || validation_indices.is_empty() {
        return Err(Error::input("dataset too small for a train/validation split"));
    }

    let mut model = LinearModel::zeros(data.num_classes(), data.dim());
    let mut best = model.clone();
    let mut best_epoch = 0;
    let mut best_qwk = f64::NEG_INFINITY;
    let mut history = Vec::with_capacity(epochs + 1);

    for epoch in 0..=epochs {
        let (train_loss, grad) = batch_loss_and_grad(&model, data, &train_indices, labels);
        if !train_loss.is_finite() || model.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::TrainingDiverged {
                epoch,
                loss: train_loss,
            });
        }
        let validation_qwk = qwk_on(&model, data, &validation_indices);
        history.push(EpochStats {
            epoch,
            train_loss,
            validation_loss: batch_loss(&model, data, &validation_indices, labels),
            validation_qwk,
        });
        // Ties go to the later epoch, which has seen more descent steps.
        if validation_qwk >= best_qwk {
            best_qwk = validation_qwk;
            best_epoch = epoch;
            best.weights.copy_from_slice(&model.weights);
        }
        if epoch < epochs {
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= lr * g;
            }
        }
    }

    Ok(TrainedModel {
        model: best,
        best_epoch,
        validation_qwk: best_qwk,
        train_indices,
        validation_indices,
        history,
    })
}
