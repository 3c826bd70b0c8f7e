//! Bagged decision trees with per-node feature sampling.

use rand::Rng;

use super::tree::{self, Tree};
use super::{ForestParams, TreeParams};
use crate::rng::{rng_for, Stream};

/// Mean of the per-tree leaf frequencies.
pub(super) fn scores(trees: &[Tree], x: &[f64], n_classes: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n_classes];
    for t in trees {
        for (a, p) in acc.iter_mut().zip(t.probs(x)) {
            *a += p;
        }
    }
    for a in &mut acc {
        *a /= trees.len() as f64;
    }
    acc
}

/// Trains `n_trees` trees. Tree `t` draws its bootstrap sample and all its
/// feature subsets from a stream derived from (seed, t), so the forest does
/// not depend on training order or thread count.
pub(super) fn fit(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    params: &ForestParams,
    tree_params: &TreeParams,
    seed: u64,
) -> Vec<Tree> {
    let n = x.len();
    let dim = x[0].len();
    let per_split = params
        .features_per_split
        .unwrap_or_else(|| ((dim as f64).sqrt().floor() as usize).max(1))
        .min(dim);
    (0..params.n_trees)
        .map(|t| {
            let mut rng = rng_for(seed, Stream::ForestTree, t as u64);
            let idx: Vec<usize> = if params.resample {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            tree::fit(x, y, &idx, n_classes, tree_params, Some(per_split), Some(&mut rng))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::argmax_tie_low;

    fn blobs() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let centers = [[0.0, 0.0], [6.0, 0.0], [3.0, 6.0]];
        let mut rng = rng_for(41, Stream::Synth, 0);
        for (c, center) in centers.iter().enumerate() {
            for _ in 0..20 {
                let jitter: [f64; 2] =
                    [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
                x.push(vec![center[0] + jitter[0], center[1] + jitter[1]]);
                y.push(c);
            }
        }
        (x, y)
    }

    #[test]
    fn forest_classifies_blobs() {
        let (x, y) = blobs();
        let trees = fit(&x, &y, 3, &ForestParams::default(), &TreeParams::default(), 7);
        let hits = x
            .iter()
            .zip(&y)
            .filter(|(xi, &yi)| argmax_tie_low(&scores(&trees, xi, 3)) == yi)
            .count();
        assert!(hits >= 57, "forest training accuracy too low: {hits}/60");
    }

    #[test]
    fn scores_are_vote_fractions() {
        let (x, y) = blobs();
        let trees = fit(&x, &y, 3, &ForestParams::default(), &TreeParams::default(), 7);
        let s = scores(&trees, &x[0], 3);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(s.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = blobs();
        let a = fit(&x, &y, 3, &ForestParams::default(), &TreeParams::default(), 11);
        let b = fit(&x, &y, 3, &ForestParams::default(), &TreeParams::default(), 11);
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_usually_differ() {
        let (x, y) = blobs();
        let a = fit(&x, &y, 3, &ForestParams::default(), &TreeParams::default(), 11);
        let b = fit(&x, &y, 3, &ForestParams::default(), &TreeParams::default(), 12);
        assert_ne!(a, b);
    }

    #[test]
    fn resample_off_uses_every_sample_in_every_tree() {
        // With resampling off and the full feature count, all trees see the
        // same consistent data and reach pure leaves, so each tree alone is
        // perfect on the training set.
        let (x, y) = blobs();
        let params = ForestParams {
            n_trees: 5,
            features_per_split: Some(2),
            resample: false,
        };
        let trees = fit(&x, &y, 3, &params, &TreeParams::default(), 3);
        for t in &trees {
            for (xi, &yi) in x.iter().zip(&y) {
                assert_eq!(argmax_tie_low(t.probs(xi)), yi);
            }
        }
    }
}
