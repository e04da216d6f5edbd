//! Cross-entropy against soft targets, `L = -sum_j q(j, k) ln p_j`, plus the
//! softmax and the fused logits path used during training.

use crate::encoding::SoftLabelMatrix;

/// Floor applied inside the logarithm so zero probabilities never produce
/// an infinite loss.
pub const LOG_FLOOR: f64 = 1e-12;

/// Max-subtracted softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = out.iter().sum();
    for p in &mut out {
        *p /= total;
    }
    out
}

/// `ln sum_j exp(z_j)`, stabilised.
pub fn log_sum_exp(logits: &[f64]) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln()
}

/// Regularised cross-entropy of predicted probabilities `probs` for true
/// class `k`.
pub fn reg_cce(probs: &[f64], k: usize, labels: &SoftLabelMatrix) -> f64 {
    let target = labels.row(k);
    assert_eq!(probs.len(), target.len(), "probability vector has the wrong length");
    target
        .iter()
        .zip(probs)
        .filter(|(&q, _)| q > 0.0)
        .map(|(&q, &p)| -q * p.max(LOG_FLOOR).ln())
        .sum()
}

/// Gradient of `reg_cce(softmax(z), k)` with respect to the logits:
/// `softmax(z) - q(., k)`.
pub fn reg_cce_grad(logits: &[f64], k: usize, labels: &SoftLabelMatrix) -> Vec<f64> {
    let target = labels.row(k);
    assert_eq!(logits.len(), target.len(), "logit vector has the wrong length");
    softmax(logits).into_iter().zip(target).map(|(p, &q)| p - q).collect()
}

/// Loss and gradient straight from logits using log-softmax, without the
/// probability floor. Writes the gradient into `grad`.
pub fn reg_cce_from_logits(logits: &[f64], k: usize, labels: &SoftLabelMatrix, grad: &mut [f64]) -> f64 {
    let target = labels.row(k);
    debug_assert_eq!(logits.len(), target.len());
    debug_assert_eq!(grad.len(), target.len());
    let lse = log_sum_exp(logits);
    let mut loss = 0.0;
    for ((g, &z), &q) in grad.iter_mut().zip(logits).zip(target) {
        *g = (z - lse).exp() - q;
        if q > 0.0 {
            loss += q * (lse - z);
        }
    }
    loss
}

/// Shannon entropy (nats) of a probability vector; the minimum of
/// [`reg_cce`] over all predictions.
pub fn entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{encode_matrix, one_hot_matrix};
    use crate::solver::SolverConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gb_labels(j: usize) -> SoftLabelMatrix {
        encode_matrix(&SolverConfig::new(j, 1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn softmax_examples() {
        for p in softmax(&[0.0, 0.0, 0.0]) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let p = softmax(&[0.0, 2f64.ln(), 3f64.ln()]);
        for (got, want) in p.iter().zip([1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        // Dyadic logits so the shift itself is exact.
        let z = [0.25, -1.5, 2.5, 0.0];
        let shifted: Vec<f64> = z.iter().map(|x| x + 1000.0).collect();
        assert_eq!(softmax(&z), softmax(&shifted));
        let z = [0.3, -1.2, 2.7];
        let shifted: Vec<f64> = z.iter().map(|x| x + 1000.0).collect();
        for (x, y) in softmax(&z).iter().zip(&softmax(&shifted)) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn one_hot_reduces_to_standard_cross_entropy() {
        let labels = one_hot_matrix(3).unwrap();
        let loss = reg_cce(&[0.7, 0.2, 0.1], 0, &labels);
        assert!((loss - -(0.7f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn soft_target_example() {
        let labels =
            SoftLabelMatrix::from_rows(vec![vec![0.9, 0.1, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let loss = reg_cce(&[0.8, 0.1, 0.1], 0, &labels);
        let expected = 0.9 * -(0.8f64.ln()) + 0.1 * -(0.1f64.ln());
        assert!((loss - expected).abs() < 1e-15);
        assert!((loss - 0.43109).abs() < 1e-5);
    }

    #[test]
    fn zero_probability_is_floored() {
        let labels = one_hot_matrix(3).unwrap();
        let loss = reg_cce(&[0.0, 0.5, 0.5], 0, &labels);
        assert!((loss - -(LOG_FLOOR.ln())).abs() < 1e-12);
    }

    #[test]
    fn minimum_is_the_row_entropy() {
        // Grid search over the probability simplex for J = 3.
        let labels = gb_labels(3);
        for k in 0..3 {
            let h = entropy(labels.row(k));
            let at_row = reg_cce(labels.row(k), k, &labels);
            assert!((at_row - h).abs() < 1e-12);
            let steps = 400;
            let mut best = f64::INFINITY;
            for a in 1..steps {
                for b in 1..steps - a {
                    let p = [
                        a as f64 / steps as f64,
                        b as f64 / steps as f64,
                        (steps - a - b) as f64 / steps as f64,
                    ];
                    let loss = reg_cce(&p, k, &labels);
                    assert!(loss >= h - 1e-9);
                    best = best.min(loss);
                }
            }
            assert!(best - h < 1e-3, "k={k}: grid min {best} vs entropy {h}");
        }
    }

    #[test]
    fn gradient_vanishes_at_target() {
        let labels = gb_labels(5);
        for k in 0..5 {
            let logits: Vec<f64> = labels.row(k).iter().map(|q| q.ln()).collect();
            for g in reg_cce_grad(&logits, k, &labels) {
                assert!(g.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let step = 1e-6;
        for _ in 0..200 {
            let j = rng.random_range(3..=10);
            let labels = gb_labels(j);
            let k = rng.random_range(0..j);
            let z: Vec<f64> = (0..j).map(|_| rng.random_range(-4.0..4.0)).collect();
            let grad = reg_cce_grad(&z, k, &labels);
            assert!(grad.iter().sum::<f64>().abs() < 1e-12);
            let mut fused = vec![0.0; j];
            let fused_loss = reg_cce_from_logits(&z, k, &labels, &mut fused);
            assert!((fused_loss - reg_cce(&softmax(&z), k, &labels)).abs() < 1e-12);
            for i in 0..j {
                let mut plus = z.clone();
                let mut minus = z.clone();
                plus[i] += step;
                minus[i] -= step;
                let fd = (reg_cce(&softmax(&plus), k, &labels) - reg_cce(&softmax(&minus), k, &labels)) / (2.0 * step);
                assert!((fd - grad[i]).abs() < 1e-6, "fd {fd} vs {}", grad[i]);
                assert!((fused[i] - grad[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn convex_along_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let j = rng.random_range(3..=10);
            let labels = gb_labels(j);
            let k = rng.random_range(0..j);
            let a: Vec<f64> = (0..j).map(|_| rng.random_range(-5.0..5.0)).collect();
            let b: Vec<f64> = (0..j).map(|_| rng.random_range(-5.0..5.0)).collect();
            let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            let f = |z: &[f64]| reg_cce(&softmax(z), k, &labels);
            assert!(f(&mid) <= 0.5 * (f(&a) + f(&b)) + 1e-9);
        }
    }
}
