//! Evaluation: confusion matrices, the six per-class rates, ROC/AUC, and
//! the split and cross-validation protocols.

mod cv;
mod roc;
mod split;

pub use cv::{
    cross_validate, evaluate, evaluate_holdout, write_roc_points, Averages, ClassAverage,
    ClassEval, EvaluationReport, FoldEval, Protocol,
};
pub use roc::{macro_auc, one_vs_rest, roc_curve, RocCurve};
pub use split::{split_holdout, split_kfold};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multi-class confusion matrix. Rows are actual classes, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> ConfusionMatrix {
        ConfusionMatrix { counts: vec![vec![0; n_classes]; n_classes] }
    }

    /// Counts (actual, predicted) pairs into an n×n matrix.
    pub fn from_labels(
        actual: &[usize],
        predicted: &[usize],
        n_classes: usize,
    ) -> Result<ConfusionMatrix> {
        if actual.len() != predicted.len() {
            return Err(Error::data(format!(
                "confusion matrix: {} actual labels vs {} predictions",
                actual.len(),
                predicted.len()
            )));
        }
        let mut cm = ConfusionMatrix::new(n_classes);
        for (&a, &p) in actual.iter().zip(predicted) {
            if a >= n_classes || p >= n_classes {
                return Err(Error::data(format!(
                    "confusion matrix: label {} outside {n_classes} classes",
                    a.max(p)
                )));
            }
            cm.counts[a][p] += 1;
        }
        Ok(cm)
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual][predicted]
    }

    /// Row-major counts; `rows()[actual][predicted]`.
    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Overall accuracy as a percentage; 0 for an empty matrix.
    pub fn accuracy_percent(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            100.0 * self.trace() as f64 / total as f64
        }
    }

    /// Collapses to one-vs-rest counts for `class`: tp is the diagonal cell,
    /// fn the rest of its row, fp the rest of its column, tn everything else.
    pub fn binarize(&self, class: usize) -> BinaryCm {
        let n = self.counts.len();
        assert!(class < n, "class {class} outside {n} classes");
        let mut b = BinaryCm::default();
        for (j, row) in self.counts.iter().enumerate() {
            for (k, &c) in row.iter().enumerate() {
                match (j == class, k == class) {
                    (true, true) => b.tp += c,
                    (true, false) => b.fn_ += c,
                    (false, true) => b.fp += c,
                    (false, false) => b.tn += c,
                }
            }
        }
        b
    }
}

/// One-vs-rest counts for a single class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BinaryCm {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl BinaryCm {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> BinaryCm {
        BinaryCm { tp, fn_, fp, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

/// Per-class rates as percentages. A rate whose denominator is zero reports
/// 0 and its name is listed in `undefined` instead of failing the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub fpr: f64,
    pub fnr: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

/// Evaluates the six standard rates from one-vs-rest counts.
pub fn metrics(b: &BinaryCm) -> ClassMetrics {
    let mut undefined = Vec::new();
    let mut pct = |num: u64, den: u64, name: &str| {
        if den == 0 {
            undefined.push(name.to_string());
            0.0
        } else {
            100.0 * num as f64 / den as f64
        }
    };
    let accuracy = pct(b.tp + b.tn, b.total(), "accuracy");
    let precision = pct(b.tp, b.tp + b.fp, "precision");
    let sensitivity = pct(b.tp, b.tp + b.fn_, "sensitivity");
    let specificity = pct(b.tn, b.tn + b.fp, "specificity");
    let fpr = pct(b.fp, b.fp + b.tn, "fpr");
    let fnr = pct(b.fn_, b.fn_ + b.tp, "fnr");
    ClassMetrics { accuracy, precision, sensitivity, specificity, fpr, fnr, undefined }
}
