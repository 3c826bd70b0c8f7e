//! CART decision tree with numeric midpoint splits.
//!
//! Determinism rules: candidate features are scanned in ascending index
//! order, thresholds in ascending value order, and a strict improvement is
//! required to replace the current best, so impurity ties resolve to the
//! lowest feature index, then the lowest threshold.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SplitCriterion, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub(crate) enum Node {
    Leaf { probs: Vec<f64> },
    Split { feature: usize, threshold: f64, left: u32, right: u32 },
}

/// Fitted tree; nodes stored in an arena, root at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub(crate) nodes: Vec<Node>,
}

impl Tree {
    /// Class frequencies of the leaf the vector falls into.
    pub fn probs(&self, x: &[f64]) -> &[f64] {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { probs } => return probs,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[*feature] <= *threshold { *left as usize } else { *right as usize };
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    /// Structural validity for deserialized trees: in-range child indices,
    /// children strictly after their parent (rules out cycles), in-range
    /// features, finite thresholds, leaf distributions of the right length.
    pub(crate) fn check(&self, dim: usize, n_classes: usize) -> std::result::Result<(), String> {
        if self.nodes.is_empty() {
            return Err("tree has no nodes".into());
        }
        for (at, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Leaf { probs } => {
                    if probs.len() != n_classes {
                        return Err(format!(
                            "leaf has {} class frequencies, expected {n_classes}",
                            probs.len()
                        ));
                    }
                    if probs.iter().any(|p| !p.is_finite()) {
                        return Err("leaf has non-finite class frequency".into());
                    }
                }
                Node::Split { feature, threshold, left, right } => {
                    if *feature >= dim {
                        return Err(format!("split on feature {feature}, dimension is {dim}"));
                    }
                    if !threshold.is_finite() {
                        return Err("non-finite split threshold".into());
                    }
                    let (l, r) = (*left as usize, *right as usize);
                    if l <= at || r <= at || l >= self.nodes.len() || r >= self.nodes.len() {
                        return Err(format!("split node {at} has bad children {l}, {r}"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn impurity(counts: &[usize], total: usize, criterion: SplitCriterion) -> f64 {
    let n = total as f64;
    match criterion {
        SplitCriterion::Gini => {
            1.0 - counts
                .iter()
                .map(|&c| {
                    let p = c as f64 / n;
                    p * p
                })
                .sum::<f64>()
        }
        SplitCriterion::Entropy => counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum(),
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    params: &'a TreeParams,
    /// When set, each node draws this many distinct candidate features.
    feature_sample: Option<usize>,
    rng: Option<&'a mut ChaCha8Rng>,
    nodes: Vec<Node>,
}

struct BestSplit {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn leaf(&mut self, counts: &[usize], total: usize) -> u32 {
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        self.nodes.push(Node::Leaf { probs });
        (self.nodes.len() - 1) as u32
    }

    /// Distinct feature indices for this node, ascending. Ascending order
    /// makes a full sample behave exactly like the plain tree.
    fn candidate_features(&mut self, dim: usize) -> Vec<usize> {
        match (self.feature_sample, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < dim => {
                use rand::seq::index::sample;
                let mut picked: Vec<usize> = sample(rng, dim, m).into_iter().collect();
                picked.sort_unstable();
                picked
            }
            _ => (0..dim).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<BestSplit> {
        let total = idx.len();
        let dim = self.x[0].len();
        let candidates = self.candidate_features(dim);
        let mut best: Option<BestSplit> = None;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(total);
        for feature in candidates {
            sorted.clear();
            sorted.extend(idx.iter().map(|&i| (self.x[i][feature], self.y[i])));
            sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut left_counts = vec![0usize; self.n_classes];
            let mut right_counts = vec![0usize; self.n_classes];
            for &(_, label) in sorted.iter() {
                right_counts[label] += 1;
            }
            for p in 0..total - 1 {
                let (v, label) = sorted[p];
                left_counts[label] += 1;
                right_counts[label] -= 1;
                let next = sorted[p + 1].0;
                if v >= next {
                    continue;
                }
                // Midpoint, pulled back onto the left value if rounding
                // would land it on the right one.
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                let n_left = p + 1;
                let n_right = total - n_left;
                let w = (n_left as f64 * impurity(&left_counts, n_left, self.params.criterion)
                    + n_right as f64 * impurity(&right_counts, n_right, self.params.criterion))
                    / total as f64;
                if best.as_ref().is_none_or(|b| w < b.impurity) {
                    best = Some(BestSplit { impurity: w, feature, threshold });
                }
            }
        }
        best
    }

    fn build(&mut self, idx: &[usize], depth: usize) -> u32 {
        let mut counts = vec![0usize; self.n_classes];
        for &i in idx {
            counts[self.y[i]] += 1;
        }
        let total = idx.len();
        let pure = counts.contains(&total);
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || total < self.params.min_samples_split || depth_capped {
            return self.leaf(&counts, total);
        }
        let Some(split) = self.best_split(idx) else {
            return self.leaf(&counts, total);
        };
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x[i][split.feature] <= split.threshold);
        debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());
        // Reserve the split slot before the children so the root is node 0.
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { probs: Vec::new() });
        let left = self.build(&left_idx, depth + 1);
        let right = self.build(&right_idx, depth + 1);
        self.nodes[at] =
            Node::Split { feature: split.feature, threshold: split.threshold, left, right };
        at as u32
    }
}

/// Fits a tree on all samples with optional per-node feature sampling (used
/// by the forest).
pub(super) fn fit(
    x: &[Vec<f64>],
    y: &[usize],
    idx: &[usize],
    n_classes: usize,
    params: &TreeParams,
    feature_sample: Option<usize>,
    rng: Option<&mut ChaCha8Rng>,
) -> Tree {
    assert!(!idx.is_empty());
    let mut b = Builder { x, y, n_classes, params, feature_sample, rng, nodes: Vec::new() };
    let root = b.build(idx, 0);
    debug_assert_eq!(root, 0);
    Tree { nodes: b.nodes }
}

/// Plain CART over the full sample and feature set.
pub(super) fn fit_full(x: &[Vec<f64>], y: &[usize], n_classes: usize, params: &TreeParams) -> Tree {
    let idx: Vec<usize> = (0..x.len()).collect();
    fit(x, y, &idx, n_classes, params, None, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::argmax_tie_low;

    #[test]
    fn separable_single_feature_gives_depth_one() {
        let x = vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]];
        let y = vec![0, 0, 1, 1];
        let tree = fit_full(&x, &y, 2, &TreeParams::default());
        assert_eq!(tree.depth(), 1);
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(argmax_tie_low(tree.probs(xi)), yi);
        }
    }

    #[test]
    fn consistent_data_reaches_pure_leaves() {
        use rand::Rng;
        let mut rng = crate::rng::rng_for(13, crate::rng::Stream::Synth, 5);
        let x: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..4).map(|_| (rng.random::<f64>() * 8.0).floor()).collect())
            .collect();
        // Label = deterministic function of the vector, so data is consistent.
        let y: Vec<usize> =
            x.iter().map(|v| ((v[0] + v[1] * 2.0 + v[3]) as usize) % 3).collect();
        let tree = fit_full(&x, &y, 3, &TreeParams::default());
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(argmax_tie_low(tree.probs(xi)), yi, "training accuracy must be 100%");
        }
    }

    #[test]
    fn duplicate_conflicting_vectors_become_frequency_leaves() {
        let x = vec![vec![1.0], vec![1.0], vec![1.0], vec![5.0]];
        let y = vec![0, 0, 1, 1];
        let tree = fit_full(&x, &y, 2, &TreeParams::default());
        let p = tree.probs(&[1.0]);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn max_depth_caps_growth() {
        let x: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..32).map(|i| i % 2).collect();
        let capped = TreeParams { max_depth: Some(2), ..Default::default() };
        let tree = fit_full(&x, &y, 2, &capped);
        assert!(tree.depth() <= 2);
    }

    #[test]
    fn entropy_criterion_also_separates() {
        let x = vec![vec![0.0, 3.0], vec![0.5, 2.0], vec![4.0, 0.0], vec![5.0, 1.0]];
        let y = vec![0, 0, 1, 1];
        let params = TreeParams { criterion: SplitCriterion::Entropy, ..Default::default() };
        let tree = fit_full(&x, &y, 2, &params);
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(argmax_tie_low(tree.probs(xi)), yi);
        }
    }

    #[test]
    fn tie_breaks_to_lowest_feature() {
        // Both features separate the classes identically; feature 0 must win.
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let y = vec![0, 1];
        let tree = fit_full(&x, &y, 2, &TreeParams::default());
        match &tree.nodes[0] {
            Node::Split { feature, .. } => assert_eq!(*feature, 0),
            other => panic!("expected split at root, got {other:?}"),
        }
    }
}
