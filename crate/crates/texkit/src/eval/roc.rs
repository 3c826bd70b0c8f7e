//! ROC curves from a descending threshold sweep, trapezoidal AUC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Receiver operating characteristic. `points` are (fpr, tpr) pairs from
/// sweeping the decision threshold over the distinct scores in descending
/// order; tied scores move together, so d distinct scores give d+1 points
/// running from (0,0) to (1,1). `auc` is the trapezoidal area, which under
/// this tie convention equals the probability that a random positive
/// outranks a random negative, counting ties as half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Builds the curve for binary truth labels and real-valued scores.
pub fn roc_curve(truth: &[bool], scores: &[f64]) -> Result<RocCurve> {
    if truth.len() != scores.len() {
        return Err(Error::data(format!(
            "roc: {} labels vs {} scores",
            truth.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::data("roc: non-finite score"));
    }
    let pos = truth.iter().filter(|&&t| t).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::data("roc: truth labels contain only one class"));
    }
    let mut order: Vec<usize> = (0..truth.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));

    let mut points = Vec::with_capacity(truth.len() + 1);
    points.push((0.0, 0.0));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if truth[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

/// One curve per class from per-class score columns: `scores[i][c]` is
/// sample i's score under class c, truth is label == c.
pub fn one_vs_rest(
    labels: &[usize],
    scores: &[Vec<f64>],
    n_classes: usize,
) -> Result<Vec<RocCurve>> {
    if labels.len() != scores.len() {
        return Err(Error::data(format!(
            "roc: {} labels vs {} score rows",
            labels.len(),
            scores.len()
        )));
    }
    (0..n_classes)
        .map(|c| {
            let truth: Vec<bool> = labels.iter().map(|&l| l == c).collect();
            let column: Vec<f64> = scores.iter().map(|row| row[c]).collect();
            roc_curve(&truth, &column)
                .map_err(|e| Error::data(format!("one-vs-rest class {c}: {e}")))
        })
        .collect()
}

/// Arithmetic mean of the per-class areas.
pub fn macro_auc(curves: &[RocCurve]) -> f64 {
    if curves.is_empty() {
        return 0.0;
    }
    curves.iter().map(|c| c.auc).sum::<f64>() / curves.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn separable_scores_reach_auc_one() {
        let truth = [true, true, false, false];
        let curve = roc_curve(&truth, &[0.9, 0.8, 0.2, 0.1]).unwrap();
        assert_eq!(curve.auc, 1.0);
        assert_eq!(
            curve.points,
            vec![(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (0.5, 1.0), (1.0, 1.0)]
        );
    }

    #[test]
    fn all_tied_scores_give_single_diagonal() {
        let truth = [true, false, true, false, false];
        let curve = roc_curve(&truth, &[0.4; 5]).unwrap();
        assert_eq!(curve.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(curve.auc, 0.5);
    }

    #[test]
    fn four_sample_reference_curve() {
        let truth = [true, false, true, false];
        let curve = roc_curve(&truth, &[0.9, 0.8, 0.4, 0.2]).unwrap();
        assert_eq!(
            curve.points,
            vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
        assert_eq!(curve.auc, 0.75);
    }

    #[test]
    fn single_class_truth_is_an_error() {
        assert!(roc_curve(&[true, true], &[0.1, 0.2]).is_err());
        assert!(roc_curve(&[false, false], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn length_mismatch_and_nan_are_errors() {
        assert!(roc_curve(&[true, false], &[0.1]).is_err());
        assert!(roc_curve(&[true, false], &[0.1, f64::NAN]).is_err());
    }

    #[test]
    fn curve_shape_invariants_hold_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.random_range(2..40usize);
            let mut truth: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            truth[0] = true;
            truth[n - 1] = false;
            // quantized scores force tie groups
            let scores: Vec<f64> =
                (0..n).map(|_| rng.random_range(0..5) as f64 / 4.0).collect();
            let curve = roc_curve(&truth, &scores).unwrap();
            assert_eq!(curve.points.first(), Some(&(0.0, 0.0)));
            assert_eq!(curve.points.last(), Some(&(1.0, 1.0)));
            for w in curve.points.windows(2) {
                assert!(w[1].0 >= w[0].0);
                assert!(w[1].1 >= w[0].1);
            }
            assert!((0.0..=1.0).contains(&curve.auc));
        }
    }

    #[test]
    fn auc_matches_pairwise_ranking_probability() {
        // trapezoid + grouped ties == (correctly ordered pairs + ties/2) / (P*N)
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.random_range(4..30usize);
            let mut truth: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            truth[0] = true;
            truth[1] = false;
            let scores: Vec<f64> =
                (0..n).map(|_| rng.random_range(0..6) as f64 / 5.0).collect();
            let curve = roc_curve(&truth, &scores).unwrap();
            let mut correct = 0.0;
            let mut pairs = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if truth[i] && !truth[j] {
                        pairs += 1.0;
                        if scores[i] > scores[j] {
                            correct += 1.0;
                        } else if scores[i] == scores[j] {
                            correct += 0.5;
                        }
                    }
                }
            }
            assert!((curve.auc - correct / pairs).abs() < 1e-12);
        }
    }

    #[test]
    fn auc_is_invariant_under_monotone_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.random_range(4..30usize);
            let mut truth: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            truth[0] = true;
            truth[1] = false;
            let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let cubed: Vec<f64> = scores.iter().map(|s| s * s * s).collect();
            let scaled: Vec<f64> = scores.iter().map(|s| 3.0 * s + 7.0).collect();
            let base = roc_curve(&truth, &scores).unwrap();
            assert_eq!(base.points, roc_curve(&truth, &cubed).unwrap().points);
            assert_eq!(base.auc, roc_curve(&truth, &cubed).unwrap().auc);
            assert_eq!(base.auc, roc_curve(&truth, &scaled).unwrap().auc);
        }
    }

    #[test]
    fn one_vs_rest_perfect_scores_give_macro_auc_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let labels: Vec<usize> = (0..30).map(|_| rng.random_range(0..4usize)).collect();
        let labels = {
            let mut l = labels;
            // force every class to appear
            l[0] = 0;
            l[1] = 1;
            l[2] = 2;
            l[3] = 3;
            l
        };
        let scores: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| (0..4).map(|c| if c == l { 1.0 } else { 0.0 }).collect())
            .collect();
        let curves = one_vs_rest(&labels, &scores, 4).unwrap();
        assert_eq!(curves.len(), 4);
        for c in &curves {
            assert_eq!(c.auc, 1.0);
        }
        assert_eq!(macro_auc(&curves), 1.0);
    }

    #[test]
    fn one_vs_rest_names_the_failing_class() {
        let labels = vec![0, 0, 1, 1];
        let scores = vec![vec![1.0, 0.0, 0.0]; 4];
        // class 2 never appears, so its one-vs-rest truth is single-class
        let err = one_vs_rest(&labels, &scores, 3).unwrap_err();
        assert!(err.to_string().contains("class 2"), "{err}");
    }
}
