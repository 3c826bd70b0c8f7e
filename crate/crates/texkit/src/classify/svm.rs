//! Linear one-vs-rest SVM trained by deterministic full-batch subgradient
//! descent on the primal hinge loss.
//!
//! Objective per class: (lambda/2)|w|^2 + mean(hinge), lambda = 1/C, with the
//! decreasing step schedule eta_t = 1/(lambda (t+1)). The bias is not
//! regularized. No randomness is involved, so retraining is bit-identical.

use super::SvmParams;

/// Per-class margins w.x + b.
pub(super) fn scores(weights: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .map(|w| {
            let mut z = w[x.len()];
            for (wi, xi) in w.iter().zip(x) {
                z += wi * xi;
            }
            z
        })
        .collect()
}

fn fit_binary(x: &[Vec<f64>], targets: &[f64], p: &SvmParams) -> Vec<f64> {
    let n = x.len();
    let dim = x[0].len();
    let lambda = 1.0 / p.c;
    let mut w = vec![0.0; dim + 1];
    for t in 0..p.epochs {
        let eta = 1.0 / (lambda * (t + 1) as f64);
        let mut grad = vec![0.0; dim + 1];
        for (xi, &yi) in x.iter().zip(targets) {
            let mut margin = w[dim];
            for (wj, xj) in w.iter().zip(xi) {
                margin += wj * xj;
            }
            if yi * margin < 1.0 {
                for (g, xj) in grad.iter_mut().zip(xi) {
                    *g -= yi * xj;
                }
                grad[dim] -= yi;
            }
        }
        for j in 0..dim {
            w[j] -= eta * (lambda * w[j] + grad[j] / n as f64);
        }
        w[dim] -= eta * grad[dim] / n as f64;
    }
    w
}

/// One hyperplane per class, bias last.
pub(super) fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize, p: &SvmParams) -> Vec<Vec<f64>> {
    (0..n_classes)
        .map(|c| {
            let targets: Vec<f64> =
                y.iter().map(|&yi| if yi == c { 1.0 } else { -1.0 }).collect();
            fit_binary(x, &targets, p)
        })
        .collect()
}
