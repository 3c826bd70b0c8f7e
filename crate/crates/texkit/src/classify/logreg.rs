//! Multinomial softmax regression, full-batch gradient descent.

use crate::error::{Error, Result};

use super::LrParams;

/// Softmax with max-shift for stability.
fn softmax(z: &mut [f64]) {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

fn logits(weights: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .map(|w| {
            let mut z = w[x.len()]; // bias
            for (wi, xi) in w.iter().zip(x) {
                z += wi * xi;
            }
            z
        })
        .collect()
}

/// Softmax probabilities for one input.
pub(super) fn scores(weights: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let mut z = logits(weights, x);
    softmax(&mut z);
    z
}

/// Mean negative log-likelihood plus L2 penalty (biases unpenalized).
fn loss(weights: &[Vec<f64>], x: &[Vec<f64>], y: &[usize], l2: f64) -> f64 {
    let n = x.len() as f64;
    let mut total = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let p = scores(weights, xi);
        total -= p[yi].max(1e-300).ln();
    }
    let penalty: f64 = weights
        .iter()
        .flat_map(|w| w[..w.len() - 1].iter())
        .map(|v| v * v)
        .sum();
    total / n + 0.5 * l2 * penalty
}

/// Trains class weight rows (dim + 1 columns, bias last) from zero init.
/// The loss sequence is checked every iteration; on an increase the run
/// restarts once with a halved rate, then fails.
pub(super) fn fit(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    p: &LrParams,
) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let dim = x[0].len();
    let mut rate = p.learning_rate;
    for attempt in 0..2 {
        let mut weights = vec![vec![0.0; dim + 1]; n_classes];
        let mut prev = f64::INFINITY;
        let mut diverged = false;
        for _ in 0..p.iterations {
            let current = loss(&weights, x, y, p.l2);
            if current > prev + 1e-9 {
                diverged = true;
                break;
            }
            prev = current;

            let mut grad = vec![vec![0.0; dim + 1]; n_classes];
            for (xi, &yi) in x.iter().zip(y) {
                let probs = scores(&weights, xi);
                for (c, g) in grad.iter_mut().enumerate() {
                    let delta = probs[c] - if c == yi { 1.0 } else { 0.0 };
                    for (gj, xj) in g.iter_mut().zip(xi) {
                        *gj += delta * xj;
                    }
                    g[dim] += delta;
                }
            }
            for (w, g) in weights.iter_mut().zip(&grad) {
                for j in 0..dim {
                    w[j] -= rate * (g[j] / n as f64 + p.l2 * w[j]);
                }
                w[dim] -= rate * g[dim] / n as f64;
            }
        }
        if !diverged {
            return Ok(weights);
        }
        if attempt == 0 {
            rate *= 0.5;
        }
    }
    Err(Error::Training(
        "logistic regression loss increased twice; learning rate too high".into(),
    ))
}
