//! K-nearest-neighbor voting over the stored (normalized) training set.

use super::Metric;

pub(super) fn distance(metric: Metric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        Metric::Euclidean => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
    }
}

/// Vote fractions of the k nearest stored points; distance ties break to the
/// lower stored index so results are order-stable.
pub(super) fn scores(
    points: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    k: usize,
    metric: Metric,
    x: &[f64],
) -> Vec<f64> {
    let mut order: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (distance(metric, p, x), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let k = k.min(order.len());
    let mut votes = vec![0.0; n_classes];
    for &(_, idx) in &order[..k] {
        votes[labels[idx]] += 1.0;
    }
    for v in &mut votes {
        *v /= k as f64;
    }
    votes
}
